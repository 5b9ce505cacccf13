#pragma once

// Data-parallel inner loops. Every hot product in the solvers is one of the
// shapes below, so the OpenMP versions are the only place threads appear.
//
// Determinism: each output entry is produced by exactly one thread with a
// fixed summation order, so results are bit-identical for any thread count.
// The `reference` namespace holds plain serial loops kept for testing and
// benchmarking; they agree with the parallel kernels to rounding only (the
// parallel dot product uses split accumulators).

#include "ngmn/common.hpp"

#include <functional>

namespace ngmn::kernels {

/// A^T B for column-major A (m x p) and B (m x q). Result p x q.
Matrix at_b(const Matrix& A, const Matrix& B);

/// A^T diag(w) B. `w` has length m.
Matrix at_w_b(const Matrix& A, const Vector& w, const Matrix& B);

/// A^T A (symmetric; upper triangle computed, then mirrored).
Matrix gram(const Matrix& A);

/// A^T diag(w) A.
Matrix weighted_gram(const Matrix& A, const Vector& w);

/// Elementwise map in place.
void map_inplace(Matrix& M, const std::function<double(double)>& f);

int max_threads();
void set_threads(int n);

namespace reference {

Matrix at_b(const Matrix& A, const Matrix& B);
Matrix at_w_b(const Matrix& A, const Vector& w, const Matrix& B);
Matrix gram(const Matrix& A);
Matrix weighted_gram(const Matrix& A, const Vector& w);
void map_inplace(Matrix& M, const std::function<double(double)>& f);

}  // namespace reference

}  // namespace ngmn::kernels
