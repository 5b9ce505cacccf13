#pragma once

// Adaptive-weight multi-class SVM head constrained to a flexible Stiefel
// manifold.
//
// With per-sample losses f_i = ||W^T x_i + b - y_i - y_i (.) m_i||^2 the head
// minimizes
//
//     sum_i alpha_i f_i + lambda ||W||_F^2 + gamma ||alpha||^2
//     s.t. W^T (X D^ X^T + lambda I) W = I_c,  alpha on the simplex,  M >= 0
//
// where D = diag(alpha), C^ = I - D 1 1^T / (1^T D 1) and D^ = C^ D C^T.
// Each block (alpha, then W and b, then M) has a closed form.

#include "ngmn/common.hpp"

#include <cstdint>
#include <vector>

namespace ngmn {

enum class GammaMode : std::uint8_t { SelfTuned = 0, Fixed = 1 };

enum class Weighting : std::uint8_t {
    Adaptive = 0,  // alpha from the closed form (or projection when gamma is fixed)
    Uniform = 1,   // alpha = 1/n throughout
};

/// Sign in the regression target G = Y (+/-) Y (.) M.
enum class SlackSign : std::int8_t { Plus = 1, Minus = -1 };

/// +/-1 label matrix, exactly one +1 per column.
struct SvmLabels {
    Matrix Ypm;  // c x n

    static SvmLabels from_one_hot(const Matrix& Y);
    static SvmLabels from_indices(const std::vector<int>& labels, int classes);

    Index classes() const { return Ypm.rows(); }
    Index samples() const { return Ypm.cols(); }
};

struct DecisionConfig {
    GammaMode gamma_mode = GammaMode::SelfTuned;
    double gamma = 1.0;  // used when gamma_mode == Fixed
    Weighting weighting = Weighting::Adaptive;
    int inner_iters = 3;

    void validate() const;
};

struct DecisionState {
    Matrix W;      // d_in x c
    Vector b;      // c
    Vector alpha;  // n, on the simplex
    Matrix M;      // c x n, >= 0
    double lambda = 0.5;
    GammaMode gamma_mode = GammaMode::SelfTuned;
    double gamma = 0.0;  // value in effect for the last alpha update
};

struct AlphaUpdate {
    Vector alpha;
    double gamma = 0.0;
};

struct WeightsBias {
    Matrix W;
    Vector b;
};

/// Objective values around each inner pass, for monotonicity checks.
struct InnerPassRecord {
    double after_weights = 0.0;  // after (W, b) with the pass's alpha
    double after_slack = 0.0;    // after M
};

/// f_i for every sample.
Vector sample_losses(const Matrix& W, const Vector& b, const Matrix& M, const Matrix& X,
                     const SvmLabels& labels);
Vector sample_losses(const DecisionState& state, const Matrix& X, const SvmLabels& labels);

/// Self-tuned gamma = (n-1)/2 f_(n) - 1/2 sum_{i<n} f_(i) and
/// alpha_i = (f_(n) - f_i)_+ / (2 gamma). Uniform alpha when all losses tie.
AlphaUpdate update_alpha(const Vector& f);

/// alpha = argmin sum alpha_i f_i + gamma ||alpha||^2 on the simplex, gamma fixed.
Vector alpha_for_fixed_gamma(const Vector& f, double gamma);

/// Regression target Y + sign * Y (.) M.
Matrix slack_target(const SvmLabels& labels, const Matrix& M, SlackSign sign = SlackSign::Plus);

/// Closed-form W, b for fixed alpha under the manifold constraint.
WeightsBias update_weights_bias(const Matrix& X, const Matrix& G, const Vector& alpha,
                                double lambda);

/// m_ij = max(y_ij (W^T x_i + b)_j - 1, 0).
Matrix update_slack(const Matrix& W, const Vector& b, const Matrix& X, const SvmLabels& labels);

/// The weighted objective with alpha and gamma taken from `state`.
double decision_objective(const DecisionState& state, const Matrix& X, const SvmLabels& labels);

/// Alternating alpha / (W, b) / M updates. `trace`, when given, receives one
/// record per inner pass.
DecisionState fit_decision_layer(const Matrix& X, const SvmLabels& labels, double lambda,
                                 const DecisionConfig& config,
                                 std::vector<InnerPassRecord>* trace = nullptr);

/// W^T X + b 1^T.
Matrix decision_scores(const DecisionState& state, const Matrix& X);

std::vector<int> predict_decision(const DecisionState& state, const Matrix& X);

}  // namespace ngmn
