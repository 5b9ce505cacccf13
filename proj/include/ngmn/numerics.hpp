#pragma once

#include "ngmn/common.hpp"

namespace ngmn {

struct SvdResult {
    Matrix U;       // p x p
    Vector sigma;   // min(p, q), non-increasing
    Matrix V;       // q x q
};

/// Full SVD with a deterministic sign convention: in each column of U the
/// entry of largest magnitude (lowest index on ties) is non-negative, and the
/// matching column of V flips with it. Columns of V beyond min(p, q) follow
/// the same rule on their own.
SvdResult svd(const Matrix& P);

/// Symmetric square root S with S * S = A, via eigendecomposition.
/// Eigenvalues in [-1e-10, 0) are clamped; below that NotPositiveDefinite.
Matrix spd_sqrt(const Matrix& A);

/// Inverse of a symmetric positive definite matrix, symmetric on return.
Matrix spd_inverse(const Matrix& A);

/// S^{-1} where S = A^{1/2}, computed from one eigendecomposition of A.
Matrix spd_inverse_sqrt(const Matrix& A);

/// I_n - (1/n) 1 1^T.
Matrix centering_matrix(Index n);

/// I_n - (1 / 1^T D 1) D 1 1^T with D = diag(alpha).
/// Right-multiplying a data matrix by it removes the alpha-weighted mean of
/// every row; it annihilates alpha (C alpha = 0).
Matrix weighted_centering(const Vector& alpha);

/// Largest absolute entry (0 for empty).
double max_abs(const Matrix& m);

}  // namespace ngmn
