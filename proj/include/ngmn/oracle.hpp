#pragma once

// Independent numerical oracles that certify the closed forms.
//
// Nothing here calls into the solvers it checks: objectives are evaluated
// with plain Eigen expressions, the simplex projection uses the sort-and-
// threshold procedure, and feasible manifold points come from QR of Gaussian
// matrices. The only solver entry points used are the ones under test.

#include "ngmn/common.hpp"
#include "ngmn/decision_layer.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ngmn::oracle {

/// Euclidean projection onto {a : sum a = 1, a >= 0}.
Vector simplex_projection(const Vector& v);

/// Norm of the central-difference gradient of `objective` at `point`.
double fd_stationarity(const std::function<double(const Vector&)>& objective, const Vector& point,
                       double step);

/// W = S^{-1} Q for random orthonormal-column Q (d x c), so W^T S^2 W = I_c.
std::vector<Matrix> random_feasible_manifold_points(const Matrix& S, Index classes, std::size_t count,
                                                    std::uint64_t seed);

/// ||W^T X + b 1^T - T||_F^2 + lambda ||W||_F^2, written out directly.
double ridge_objective(const Matrix& W, const Vector& b, const Matrix& X, const Matrix& T, double lambda);

/// sum_i alpha_i ||W^T x_i + b - y_i - y_i (.) m_i||^2 + lambda ||W||^2 + gamma ||alpha||^2.
double weighted_svm_objective(const Matrix& W, const Vector& b, const Matrix& M, const Vector& alpha,
                              double gamma, double lambda, const Matrix& X, const Matrix& Ypm);

/// X C^ D C^T X^T + lambda I built from explicit n x n matrices.
Matrix explicit_constraint_matrix(const Matrix& X, const Vector& alpha, double lambda);

/// tr(W^T X D^ G^T) with D^ built explicitly.
double procrustes_trace(const Matrix& W, const Matrix& X, const Vector& alpha, const Matrix& G);

struct GSignReport {
    double objective_plus = 0.0;   // G = Y + Y (.) M
    double objective_minus = 0.0;  // G = Y - Y (.) M
    SlackSign winner = SlackSign::Plus;
    bool strict = false;
};

/// Solves (W, b) under both slack signs with alpha fixed and compares the
/// weighted objective (evaluated with the loss f_i as defined, with the
/// given M).
GSignReport g_sign_probe(const Matrix& X, const SvmLabels& labels, const Vector& alpha, double lambda,
                         const Matrix& M);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// The certification suite behind the `verify` command.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

}  // namespace ngmn::oracle
