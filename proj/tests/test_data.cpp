#include "helpers.hpp"
#include "ngmn/data.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using namespace ngmn;

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::vector<std::uint8_t> idx_images(std::uint32_t magic, std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                     const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> out;
    put_u32(out, magic);
    put_u32(out, count);
    put_u32(out, rows);
    put_u32(out, cols);
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t magic, const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    put_u32(out, magic);
    put_u32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

FormatError::Kind idx_error(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
    try {
        parse_idx(images, labels);
    } catch (const FormatError& e) {
        return e.kind();
    }
    FAIL("parse_idx accepted a bad file");
    return FormatError::Kind::Malformed;
}

Dataset csv(const std::string& text, const LabelColumn& col = std::size_t{0}) {
    std::istringstream in(text);
    return parse_csv(in, col, "t.csv");
}

std::string csv_error(const std::string& text, const LabelColumn& col = std::size_t{0}) {
    try {
        csv(text, col);
    } catch (const FormatError& e) {
        CHECK(e.kind() == FormatError::Kind::Malformed);
        return e.what();
    }
    FAIL("parse_csv accepted bad input");
    return {};
}

}  // namespace

TEST_CASE("parse_idx scales pixels and keeps row-major order") {
    const auto images = idx_images(0x803, 2, 2, 2, {0, 255, 51, 102, 255, 0, 0, 0});
    const Dataset ds = parse_idx(images, idx_labels(0x801, {3, 7}));
    CHECK(ds.features() == 4);
    CHECK(ds.samples() == 2);
    CHECK(ds.X(0, 0) == 0.0);
    CHECK(ds.X(1, 0) == 1.0);
    CHECK(ds.X(2, 0) == doctest::Approx(0.2));
    CHECK(ds.X(0, 1) == 1.0);
    CHECK(ds.labels.size() == 2);
    CHECK(ds.labels == std::vector<int>{3, 7});
    CHECK(ds.classes == 8);
}

TEST_CASE("parse_idx errors") {
    const auto labels = idx_labels(0x801, {1, 2});
    CHECK(idx_error(idx_images(0x802, 2, 1, 1, {0, 0}), labels) == FormatError::Kind::BadMagic);
    CHECK(idx_error(idx_images(0x803, 2, 1, 1, {0, 0}), idx_labels(0x800, {1, 2})) == FormatError::Kind::BadMagic);
    CHECK(idx_error(idx_images(0x803, 3, 1, 1, {0, 0, 0}), labels) == FormatError::Kind::CountMismatch);
    CHECK(idx_error(idx_images(0x803, 2, 2, 2, {0, 0, 0}), labels) == FormatError::Kind::Truncated);
    CHECK(idx_error({0, 0, 8}, labels) == FormatError::Kind::Truncated);
}

TEST_CASE("bundled gzip MNIST test set loads") {
    const std::string images = std::string(NGMN_SOURCE_DIR) + "/data/mnist/t10k-images-idx3-ubyte.gz";
    const std::string labels = std::string(NGMN_SOURCE_DIR) + "/data/mnist/t10k-labels-idx1-ubyte.gz";
    const Dataset ds = load_idx(images, labels);
    CHECK(ds.samples() == 10000);
    CHECK(ds.features() == 784);
    CHECK(ds.classes == 10);
    CHECK(ds.X.minCoeff() >= 0.0);
    CHECK(ds.X.maxCoeff() <= 1.0);
    CHECK_THROWS_AS(load_idx(images + ".missing", labels), FormatError);
}

TEST_CASE("parse_csv remaps labels in sorted order") {
    const Dataset ds = csv("5,1.0,2.0\n7,3.0,4.0\n5,5.0,6.0\n");
    CHECK(ds.classes == 2);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.features() == 2);
    CHECK(ds.X(1, 2) == 6.0);
}

TEST_CASE("parse_csv with a header, a named label column and one feature") {
    const Dataset ds = csv("x,label\n0.5,1\n-2,0\n", std::string("label"));
    CHECK(ds.features() == 1);
    CHECK(ds.labels == std::vector<int>{1, 0});
    CHECK(ds.X(0, 1) == -2.0);

    const Dataset by_index = csv("0.5,1\n-2,0\n", std::size_t{1});
    CHECK(by_index.labels == ds.labels);
}

TEST_CASE("parse_csv errors name the row") {
    CHECK(csv_error("1,2,3\n0,4\n").find("t.csv:2") != std::string::npos);
    CHECK(csv_error("1,2\n0,abc\n").find("abc") != std::string::npos);
    CHECK(csv_error("a,b\n1,2\n", std::string("label")).find("label") != std::string::npos);
    CHECK(!csv_error("1.5,2\n").empty());
    CHECK(!csv_error("").empty());
    CHECK(!csv_error("1,2\n", std::size_t{5}).empty());
}

TEST_CASE("write_csv and load_csv round-trip") {
    const Dataset ds = make_blobs(12, 3, 3, 1.0, 2.0, 1);
    const std::string path = testing::tmp_path("roundtrip.csv");
    {
        std::ofstream out(path);
        write_csv(ds, out);
    }
    const Dataset back = load_csv(path, std::size_t{0});
    CHECK(back.labels == ds.labels);
    CHECK(testing::bit_equal(back.X, ds.X));
}

TEST_CASE("normalize_rows") {
    Dataset ds;
    ds.X.resize(2, 3);
    ds.X << 2, 4, 6,
            3, 3, 3;
    ds.labels = {0, 1, 0};
    ds.classes = 2;
    const Dataset n = normalize_rows(ds);
    CHECK(n.X(0, 0) == 0.0);
    CHECK(n.X(0, 1) == 0.5);
    CHECK(n.X(0, 2) == 1.0);
    CHECK(n.X.row(1).isZero());
}

TEST_CASE("RowScaling clamps values outside the fitted range") {
    Matrix fit(1, 2);
    fit << 0, 10;
    const RowScaling s = RowScaling::fit(fit);
    Matrix x(1, 3);
    x << -5, 5, 20;
    const Matrix y = s.apply(x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 0.5);
    CHECK(y(0, 2) == 1.0);
}

TEST_CASE("split") {
    Dataset ds;
    ds.X = testing::gaussian(2, 10, 2);
    ds.labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    ds.classes = 2;
    const auto [train, test] = split(ds, 0.8, 3);
    CHECK(train.samples() == 8);
    CHECK(test.samples() == 2);
    std::set<double> seen;
    for (Index j = 0; j < train.samples(); ++j) seen.insert(train.X(0, j));
    for (Index j = 0; j < test.samples(); ++j) seen.insert(test.X(0, j));
    CHECK(seen.size() == 10);
    CHECK(std::count(test.labels.begin(), test.labels.end(), 0) == 1);
    CHECK(std::count(test.labels.begin(), test.labels.end(), 1) == 1);

    const auto [again, again_test] = split(ds, 0.8, 3);
    CHECK(testing::bit_equal(again.X, train.X));
    CHECK(again_test.labels == test.labels);

    CHECK_THROWS_AS(split(ds, 1.0, 0), InvalidConfig);
    CHECK_THROWS_AS(split(ds, 0.0, 0), InvalidConfig);
}

TEST_CASE("accuracy") {
    CHECK(accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
    CHECK(accuracy({1, 0}, {0, 1}) == 0.0);
    CHECK(accuracy({0, 1, 1, 1}, {0, 1, 0, 1}) == 0.75);
    CHECK_THROWS_AS(accuracy({0}, {0, 1}), ShapeError);
}

TEST_CASE("macro_f1") {
    CHECK(macro_f1({0, 1, 1}, {0, 1, 1}, 2) == 1.0);
    CHECK(macro_f1({0, 1, 1, 1}, {0, 0, 1, 1}, 2) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
    CHECK(macro_f1({0, 1}, {0, 1}, 3) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(macro_f1({0}, {0, 1}, 2), ShapeError);
}

TEST_CASE("synthetic generators are seeded") {
    const Dataset a = make_blobs(30, 4, 3, 1.0, 10.0, 5);
    CHECK(a.features() == 4);
    CHECK(a.samples() == 30);
    CHECK(testing::bit_equal(a.X, make_blobs(30, 4, 3, 1.0, 10.0, 5).X));
    CHECK(std::count(a.labels.begin(), a.labels.end(), 2) == 10);

    const Dataset bench = blobs_benchmark(1);
    CHECK(bench.features() == 10);
    CHECK(bench.samples() == 600);
    CHECK(bench.classes == 3);

    const Dataset w = make_waveform(300, 6);
    CHECK(w.features() == 21);
    CHECK(w.classes == 3);
    CHECK(testing::bit_equal(w.X, make_waveform(300, 6).X));
    for (int c = 0; c < 3; ++c) CHECK(std::count(w.labels.begin(), w.labels.end(), c) > 60);
}
