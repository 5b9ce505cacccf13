#pragma once

#include "ngmn/common.hpp"
#include "ngmn/rng.hpp"

#include <cstring>
#include <string>

namespace testing {

inline ngmn::Matrix gaussian(ngmn::Index rows, ngmn::Index cols, std::uint64_t seed) {
    ngmn::Rng rng(seed);
    ngmn::Matrix m(rows, cols);
    for (ngmn::Index j = 0; j < cols; ++j)
        for (ngmn::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

inline bool bit_equal(const ngmn::Matrix& a, const ngmn::Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

inline std::string tmp_path(const std::string& name) { return std::string(NGMN_TEST_TMP) + "/" + name; }

}  // namespace testing
