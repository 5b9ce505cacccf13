#include "ngmn/kernels.hpp"

#include <omp.h>

namespace ngmn::kernels {

namespace {

// Four independent accumulators; combined in a fixed order.
inline double dot(const double* a, const double* b, Index m) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Index i = 0;
    for (; i + 4 <= m; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < m; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline double wdot(const double* a, const double* w, const double* b, Index m) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Index i = 0;
    for (; i + 4 <= m; i += 4) {
        s0 += a[i] * w[i] * b[i];
        s1 += a[i + 1] * w[i + 1] * b[i + 1];
        s2 += a[i + 2] * w[i + 2] * b[i + 2];
        s3 += a[i + 3] * w[i + 3] * b[i + 3];
    }
    for (; i < m; ++i) s0 += a[i] * w[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void check_inner(const Matrix& A, const Matrix& B) {
    require_shape(A.rows() == B.rows(), "kernel inner dimension mismatch: " + shape_string(A) +
                                            " vs " + shape_string(B));
}

void check_weights(const Matrix& A, const Vector& w) {
    require_shape(w.size() == A.rows(), "kernel weight length " + std::to_string(w.size()) +
                                            " does not match " + std::to_string(A.rows()) +
                                            " rows");
}

}  // namespace

Matrix at_b(const Matrix& A, const Matrix& B) {
    check_inner(A, B);
    const Index m = A.rows(), p = A.cols(), q = B.cols();
    Matrix out(p, q);
    const double* a = A.data();
    const double* b = B.data();
    double* o = out.data();
#pragma omp parallel for collapse(2) schedule(static)
    for (Index k = 0; k < q; ++k)
        for (Index j = 0; j < p; ++j) o[k * p + j] = dot(a + j * m, b + k * m, m);
    return out;
}

Matrix at_w_b(const Matrix& A, const Vector& w, const Matrix& B) {
    check_inner(A, B);
    check_weights(A, w);
    const Index m = A.rows(), p = A.cols(), q = B.cols();
    Matrix out(p, q);
    const double* a = A.data();
    const double* b = B.data();
    const double* wp = w.data();
    double* o = out.data();
#pragma omp parallel for collapse(2) schedule(static)
    for (Index k = 0; k < q; ++k)
        for (Index j = 0; j < p; ++j) o[k * p + j] = wdot(a + j * m, wp, b + k * m, m);
    return out;
}

Matrix gram(const Matrix& A) {
    const Index m = A.rows(), p = A.cols();
    Matrix out(p, p);
    const double* a = A.data();
#pragma omp parallel for schedule(dynamic, 4)
    for (Index k = 0; k < p; ++k)
        for (Index j = 0; j <= k; ++j) out(j, k) = dot(a + j * m, a + k * m, m);
    for (Index k = 0; k < p; ++k)
        for (Index j = k + 1; j < p; ++j) out(j, k) = out(k, j);
    return out;
}

Matrix weighted_gram(const Matrix& A, const Vector& w) {
    check_weights(A, w);
    const Index m = A.rows(), p = A.cols();
    Matrix out(p, p);
    const double* a = A.data();
    const double* wp = w.data();
#pragma omp parallel for schedule(dynamic, 4)
    for (Index k = 0; k < p; ++k)
        for (Index j = 0; j <= k; ++j) out(j, k) = wdot(a + j * m, wp, a + k * m, m);
    for (Index k = 0; k < p; ++k)
        for (Index j = k + 1; j < p; ++j) out(j, k) = out(k, j);
    return out;
}

void map_inplace(Matrix& M, const std::function<double(double)>& f) {
    double* d = M.data();
    const Index size = M.size();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < size; ++i) d[i] = f(d[i]);
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

namespace reference {

Matrix at_b(const Matrix& A, const Matrix& B) {
    check_inner(A, B);
    Matrix out = Matrix::Zero(A.cols(), B.cols());
    for (Index j = 0; j < A.cols(); ++j)
        for (Index k = 0; k < B.cols(); ++k)
            for (Index i = 0; i < A.rows(); ++i) out(j, k) += A(i, j) * B(i, k);
    return out;
}

Matrix at_w_b(const Matrix& A, const Vector& w, const Matrix& B) {
    check_inner(A, B);
    check_weights(A, w);
    Matrix out = Matrix::Zero(A.cols(), B.cols());
    for (Index j = 0; j < A.cols(); ++j)
        for (Index k = 0; k < B.cols(); ++k)
            for (Index i = 0; i < A.rows(); ++i) out(j, k) += A(i, j) * w(i) * B(i, k);
    return out;
}

Matrix gram(const Matrix& A) { return at_b(A, A); }

Matrix weighted_gram(const Matrix& A, const Vector& w) { return at_w_b(A, w, A); }

void map_inplace(Matrix& M, const std::function<double(double)>& f) {
    for (Index j = 0; j < M.cols(); ++j)
        for (Index i = 0; i < M.rows(); ++i) M(i, j) = f(M(i, j));
}

}  // namespace reference

}  // namespace ngmn::kernels
