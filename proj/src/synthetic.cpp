#include "ngmn/data.hpp"

#include "ngmn/rng.hpp"

#include <array>
#include <cmath>

namespace ngmn {

Dataset make_blobs(Index n, Index d, int classes, double stddev, double center_box,
                   std::uint64_t seed) {
    if (n < 1 || d < 1 || classes < 1) throw InvalidInput("make_blobs: sizes must be positive");
    Rng rng(seed);
    Matrix centers(d, classes);
    for (int c = 0; c < classes; ++c)
        for (Index k = 0; k < d; ++k) centers(k, c) = rng.uniform(-center_box, center_box);

    Dataset ds;
    ds.classes = classes;
    ds.X.resize(d, n);
    ds.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % classes);
        ds.labels[static_cast<std::size_t>(i)] = c;
        for (Index k = 0; k < d; ++k) ds.X(k, i) = centers(k, c) + stddev * rng.normal();
    }
    return ds;
}

Dataset blobs_benchmark(std::uint64_t seed) { return make_blobs(600, 10, 3, 1.0, 10.0, seed); }

Dataset make_waveform(Index n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("make_waveform: n must be positive");
    constexpr Index kDim = 21;
    // Base waves on positions 1..21: a triangle peaking at 11, and copies
    // shifted four positions right and left.
    std::array<std::array<double, kDim>, 3> base{};
    for (Index m = 1; m <= kDim; ++m) {
        auto tri = [](double center, double pos) { return std::max(6.0 - std::abs(pos - center), 0.0); };
        base[0][static_cast<std::size_t>(m - 1)] = tri(11.0, static_cast<double>(m));
        base[1][static_cast<std::size_t>(m - 1)] = tri(15.0, static_cast<double>(m));
        base[2][static_cast<std::size_t>(m - 1)] = tri(7.0, static_cast<double>(m));
    }
    constexpr std::array<std::array<int, 2>, 3> mix{{{0, 1}, {0, 2}, {1, 2}}};

    Rng rng(seed);
    Dataset ds;
    ds.classes = 3;
    ds.X.resize(kDim, n);
    ds.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const int c = static_cast<int>(rng.below(3));
        const double u = rng.uniform();
        const auto& a = base[static_cast<std::size_t>(mix[static_cast<std::size_t>(c)][0])];
        const auto& b = base[static_cast<std::size_t>(mix[static_cast<std::size_t>(c)][1])];
        ds.labels[static_cast<std::size_t>(i)] = c;
        for (Index m = 0; m < kDim; ++m) {
            const auto k = static_cast<std::size_t>(m);
            ds.X(m, i) = u * a[k] + (1.0 - u) * b[k] + rng.normal();
        }
    }
    return ds;
}

}  // namespace ngmn
