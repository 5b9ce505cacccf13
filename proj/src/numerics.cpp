#include "ngmn/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace ngmn {

namespace {

constexpr double kNegativeEigenTolerance = 1e-10;
constexpr double kEigenFloor = 1e-12;
constexpr double kSymmetryTolerance = 1e-10;

// Column sign rule: largest-magnitude entry, first on ties, made non-negative.
bool needs_flip(const Eigen::Ref<const Vector>& col) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < col.size(); ++i) {
        const double a = std::abs(col(i));
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    return col(best) < 0.0;
}

void check_symmetric(const Matrix& A, const char* who) {
    require_shape(A.rows() == A.cols(), std::string(who) + ": matrix must be square, got " +
                                            shape_string(A));
    if (!A.allFinite()) throw InvalidInput(std::string(who) + ": non-finite entry");
    const double scale = std::max(1.0, max_abs(A));
    if (max_abs(A - A.transpose()) > kSymmetryTolerance * scale)
        throw InvalidInput(std::string(who) + ": matrix is not symmetric");
}

// Eigenpairs of a symmetric matrix. Small negative eigenvalues are raised to
// `floor`: zero for the square root, 1e-12 where the result is inverted.
Eigen::SelfAdjointEigenSolver<Matrix> checked_eigen(const Matrix& A, const char* who,
                                                   Vector& eigenvalues, double floor = kEigenFloor) {
    check_symmetric(A, who);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
    if (eig.info() != Eigen::Success)
        throw NotPositiveDefinite(std::string(who) + ": eigendecomposition failed");
    eigenvalues = eig.eigenvalues();
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) < -kNegativeEigenTolerance) {
            std::ostringstream msg;
            msg << who << ": eigenvalue " << eigenvalues(i) << " is negative";
            throw NotPositiveDefinite(msg.str());
        }
        eigenvalues(i) = std::max(eigenvalues(i), floor);
    }
    return eig;
}

Matrix symmetric_from(const Matrix& Q, const Vector& diag) {
    Matrix out = Q * diag.asDiagonal() * Q.transpose();
    return 0.5 * (out + out.transpose());
}

}  // namespace

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

SvdResult svd(const Matrix& P) {
    if (!P.allFinite()) throw InvalidInput("svd: non-finite entry");
    Eigen::JacobiSVD<Matrix> solver(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdResult r{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    const Index k = std::min(P.rows(), P.cols());
    for (Index j = 0; j < r.U.cols(); ++j) {
        if (!needs_flip(r.U.col(j))) continue;
        r.U.col(j) *= -1.0;
        if (j < k) r.V.col(j) *= -1.0;
    }
    for (Index j = k; j < r.V.cols(); ++j)
        if (needs_flip(r.V.col(j))) r.V.col(j) *= -1.0;
    return r;
}

Matrix spd_sqrt(const Matrix& A) {
    Vector ev;
    auto eig = checked_eigen(A, "spd_sqrt", ev, 0.0);
    return symmetric_from(eig.eigenvectors(), ev.cwiseSqrt());
}

Matrix spd_inverse(const Matrix& A) {
    Vector ev;
    auto eig = checked_eigen(A, "spd_inverse", ev);
    return symmetric_from(eig.eigenvectors(), ev.cwiseInverse());
}

Matrix spd_inverse_sqrt(const Matrix& A) {
    Vector ev;
    auto eig = checked_eigen(A, "spd_inverse_sqrt", ev);
    return symmetric_from(eig.eigenvectors(), ev.cwiseSqrt().cwiseInverse());
}

Matrix centering_matrix(Index n) {
    if (n < 1) throw InvalidInput("centering_matrix: n must be >= 1");
    Matrix C = Matrix::Identity(n, n);
    C.array() -= 1.0 / static_cast<double>(n);
    return C;
}

Matrix weighted_centering(const Vector& alpha) {
    if (alpha.size() < 1) throw InvalidInput("weighted_centering: empty weights");
    if ((alpha.array() < 0.0).any()) throw InvalidInput("weighted_centering: negative weight");
    const double total = alpha.sum();
    if (!(total > 0.0)) throw InvalidInput("weighted_centering: weights must sum to > 0");
    const Index n = alpha.size();
    if ((alpha.array() == alpha(0)).all()) return centering_matrix(n);
    Matrix C = Matrix::Identity(n, n);
    // D 1 1^T has alpha in every column.
    for (Index j = 0; j < n; ++j) C.col(j) -= alpha / total;
    return C;
}

}  // namespace ngmn
