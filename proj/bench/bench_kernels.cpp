// Times the OpenMP kernels against the serial reference versions and checks
// that they agree.

#include "ngmn/kernels.hpp"
#include "ngmn/rng.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using ngmn::Matrix;
using ngmn::Vector;

namespace {

Matrix random_matrix(ngmn::Rng& rng, ngmn::Index r, ngmn::Index c) {
    Matrix m(r, c);
    for (ngmn::Index j = 0; j < c; ++j)
        for (ngmn::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
    return m;
}

double best_of(int reps, const std::function<Matrix()>& f, Matrix& result) {
    double best = 1e300;
    for (int k = 0; k < reps; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        result = f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, int reps, const std::function<Matrix()>& ref, const std::function<Matrix()>& par) {
    Matrix a, b;
    const double t_ref = best_of(reps, ref, a);
    const double t_par = best_of(reps, par, b);
    std::printf("%-24s %10.4f %10.4f %8.2fx %10.2e\n", name.c_str(), t_ref * 1e3, t_par * 1e3, t_ref / t_par,
                (a - b).cwiseAbs().maxCoeff());
}

}  // namespace

int main(int argc, char** argv) {
    const ngmn::Index scale = argc > 1 ? std::stol(argv[1]) : 1;
    ngmn::Rng rng(42);
    const ngmn::Index n = 4000 * scale, d = 256, c = 32;
    const Matrix X = random_matrix(rng, n, d);
    const Matrix B = random_matrix(rng, n, c);
    Vector w(n);
    for (ngmn::Index i = 0; i < n; ++i) w(i) = rng.uniform();

    std::printf("threads: %d, X is %ld x %ld\n", ngmn::kernels::max_threads(), static_cast<long>(n), static_cast<long>(d));
    std::printf("%-24s %10s %10s %9s %10s\n", "kernel", "ref ms", "omp ms", "speedup", "max diff");
    namespace k = ngmn::kernels;
    namespace r = ngmn::kernels::reference;
    row("at_b (X^T B)", 3, [&] { return r::at_b(X, B); }, [&] { return k::at_b(X, B); });
    row("at_w_b (X^T D B)", 3, [&] { return r::at_w_b(X, w, B); }, [&] { return k::at_w_b(X, w, B); });
    row("gram (X^T X)", 3, [&] { return r::gram(X); }, [&] { return k::gram(X); });
    row("weighted_gram", 3, [&] { return r::weighted_gram(X, w); }, [&] { return k::weighted_gram(X, w); });
    const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    row("map_inplace (sigmoid)", 3,
        [&] { Matrix m = X; r::map_inplace(m, sig); return m; },
        [&] { Matrix m = X; k::map_inplace(m, sig); return m; });
    return 0;
}
