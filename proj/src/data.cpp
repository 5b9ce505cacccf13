#include "ngmn/data.hpp"

#include "ngmn/rng.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace ngmn {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

bool is_gzip(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
        throw FormatError(FormatError::Kind::Io, "zlib initialisation failed");
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> chunk{};
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk.data();
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            const auto at = zs.total_in;
            inflateEnd(&zs);
            throw FormatError(rc == Z_BUF_ERROR ? FormatError::Kind::Truncated : FormatError::Kind::Malformed,
                              "gzip stream error at compressed offset " + std::to_string(at));
        }
        out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
        if (rc != Z_STREAM_END && zs.avail_in == 0 && zs.avail_out != 0) {
            const auto at = zs.total_in;
            inflateEnd(&zs);
            throw FormatError(FormatError::Kind::Truncated,
                              "gzip stream truncated at compressed offset " + std::to_string(at));
        }
    }
    inflateEnd(&zs);
    return out;
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
    if (bytes.size() < offset + 4)
        throw FormatError(FormatError::Kind::Truncated,
                          std::string(what) + ": header truncated at byte offset " + std::to_string(bytes.size()));
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

// ---- IDX ----------------------------------------------------------------

Dataset parse_idx(std::span<const std::uint8_t> images_in, std::span<const std::uint8_t> labels_in) {
    std::vector<std::uint8_t> inflated_images, inflated_labels;
    std::span<const std::uint8_t> images = images_in, labels = labels_in;
    if (is_gzip(images)) {
        inflated_images = gunzip(images);
        images = inflated_images;
    }
    if (is_gzip(labels)) {
        inflated_labels = gunzip(labels);
        labels = inflated_labels;
    }

    const auto image_magic = read_be32(images, 0, "IDX images");
    if (image_magic != kIdxImagesMagic) {
        std::ostringstream msg;
        msg << "IDX images: wrong magic 0x" << std::hex << std::setw(8) << std::setfill('0') << image_magic
            << " at byte offset 0";
        throw FormatError(FormatError::Kind::BadMagic, msg.str());
    }
    const auto label_magic = read_be32(labels, 0, "IDX labels");
    if (label_magic != kIdxLabelsMagic) {
        std::ostringstream msg;
        msg << "IDX labels: wrong magic 0x" << std::hex << std::setw(8) << std::setfill('0') << label_magic
            << " at byte offset 0";
        throw FormatError(FormatError::Kind::BadMagic, msg.str());
    }

    const std::size_t n_images = read_be32(images, 4, "IDX images");
    const std::size_t rows = read_be32(images, 8, "IDX images");
    const std::size_t cols = read_be32(images, 12, "IDX images");
    const std::size_t n_labels = read_be32(labels, 4, "IDX labels");
    if (n_images != n_labels)
        throw FormatError(FormatError::Kind::CountMismatch,
                          "IDX: " + std::to_string(n_images) + " images but " + std::to_string(n_labels) +
                              " labels");
    const std::size_t d = rows * cols;
    if (images.size() < 16 + n_images * d)
        throw FormatError(FormatError::Kind::Truncated,
                          "IDX images: payload truncated at byte offset " + std::to_string(images.size()) +
                              " (expected " + std::to_string(16 + n_images * d) + ")");
    if (labels.size() < 8 + n_labels)
        throw FormatError(FormatError::Kind::Truncated,
                          "IDX labels: payload truncated at byte offset " + std::to_string(labels.size()) +
                              " (expected " + std::to_string(8 + n_labels) + ")");

    Dataset ds;
    ds.X.resize(static_cast<Index>(d), static_cast<Index>(n_images));
    ds.labels.resize(n_images);
    int max_label = -1;
    for (std::size_t i = 0; i < n_images; ++i) {
        const std::uint8_t* px = images.data() + 16 + i * d;
        for (std::size_t k = 0; k < d; ++k)
            ds.X(static_cast<Index>(k), static_cast<Index>(i)) = static_cast<double>(px[k]) / 255.0;
        ds.labels[i] = labels[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.classes = max_label + 1;
    return ds;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::Io, "cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (is_gzip(bytes)) {
        try {
            return gunzip(bytes);
        } catch (const FormatError& e) {
            throw FormatError(e.kind(), path + ": " + e.what());
        }
    }
    return bytes;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto images = read_file_bytes(images_path);
    const auto labels = read_file_bytes(labels_path);
    try {
        return parse_idx(images, labels);
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), images_path + " / " + labels_path + ": " + e.what());
    }
}

// ---- CSV ----------------------------------------------------------------

Dataset parse_csv(std::istream& in, const LabelColumn& label_column, const std::string& source_name) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        rows.push_back(split_cells(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw FormatError(FormatError::Kind::Malformed, source_name + ": no data rows");

    bool has_header = false;
    for (const auto& cell : rows.front()) {
        double v = 0.0;
        if (!parse_double(cell, v)) has_header = true;
    }
    const std::size_t width = rows.front().size();

    std::size_t label_idx = 0;
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        if (!has_header)
            throw FormatError(FormatError::Kind::Malformed,
                              source_name + ": label column '" + *name + "' given by name but the file has no header");
        const auto& header = rows.front();
        const auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end())
            throw FormatError(FormatError::Kind::Malformed, source_name + ": unknown label column '" + *name + "'");
        label_idx = static_cast<std::size_t>(it - header.begin());
    } else {
        label_idx = std::get<std::size_t>(label_column);
        if (label_idx >= width)
            throw FormatError(FormatError::Kind::Malformed,
                              source_name + ": label column " + std::to_string(label_idx) + " out of range (" +
                                  std::to_string(width) + " columns)");
    }
    if (width < 2)
        throw FormatError(FormatError::Kind::Malformed, source_name + ": need a label and at least one feature");

    const std::size_t first = has_header ? 1 : 0;
    const std::size_t n = rows.size() - first;
    if (n == 0) throw FormatError(FormatError::Kind::Malformed, source_name + ": no data rows");

    Matrix X(static_cast<Index>(width - 1), static_cast<Index>(n));
    std::vector<long long> raw(n);
    for (std::size_t r = first; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        const std::string where = source_name + ":" + std::to_string(line_numbers[r]);
        if (cells.size() != width)
            throw FormatError(FormatError::Kind::Malformed,
                              where + ": row " + std::to_string(line_numbers[r]) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
        const std::size_t s = r - first;
        Index feature = 0;
        for (std::size_t c = 0; c < width; ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v))
                throw FormatError(FormatError::Kind::Malformed,
                                  where + ": non-numeric cell '" + cells[c] + "' in column " + std::to_string(c));
            if (c == label_idx) {
                if (v != std::floor(v) || std::abs(v) > 1e15)
                    throw FormatError(FormatError::Kind::Malformed,
                                      where + ": label '" + cells[c] + "' is not an integer");
                raw[s] = static_cast<long long>(v);
            } else {
                X(feature++, static_cast<Index>(s)) = v;
            }
        }
    }

    std::map<long long, int> remap;
    for (long long v : raw) remap.emplace(v, 0);
    int next = 0;
    for (auto& [value, index] : remap) index = next++;

    Dataset ds;
    ds.X = std::move(X);
    ds.classes = next;
    ds.labels.reserve(n);
    for (long long v : raw) ds.labels.push_back(remap.at(v));
    return ds;
}

Dataset load_csv(const std::string& path, const LabelColumn& label_column) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::Io, "cannot open '" + path + "'");
    return parse_csv(in, label_column, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
    out << "label";
    for (Index k = 0; k < ds.features(); ++k) out << ",x" << k;
    out << '\n';
    char buf[64];
    for (Index i = 0; i < ds.samples(); ++i) {
        out << ds.labels[static_cast<std::size_t>(i)];
        for (Index k = 0; k < ds.features(); ++k) {
            // Shortest round-trip representation.
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), ds.X(k, i));
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

// ---- preprocessing ------------------------------------------------------

RowScaling RowScaling::fit(const Matrix& X) {
    RowScaling s;
    s.min = X.rowwise().minCoeff();
    s.range = X.rowwise().maxCoeff() - s.min;
    return s;
}

Matrix RowScaling::apply(const Matrix& X) const {
    require_shape(X.rows() == min.size(), "row scaling fitted for " + std::to_string(min.size()) +
                                              " features, got " + shape_string(X));
    Matrix out(X.rows(), X.cols());
    for (Index i = 0; i < X.rows(); ++i) {
        if (range(i) <= 0.0) {
            out.row(i).setZero();
            continue;
        }
        out.row(i) = ((X.row(i).array() - min(i)) / range(i)).min(1.0).max(0.0).matrix();
    }
    return out;
}

Dataset normalize_rows(Dataset ds) {
    ds.X = RowScaling::fit(ds.X).apply(ds.X);
    return ds;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.classes = ds.classes;
    out.X.resize(ds.X.rows(), static_cast<Index>(indices.size()));
    out.labels.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.X.col(static_cast<Index>(k)) = ds.X.col(static_cast<Index>(indices[k]));
        out.labels.push_back(ds.labels[indices[k]]);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidConfig("train fraction must lie in (0, 1)");
    const std::size_t n = ds.labels.size();
    if (n < 2) throw InvalidInput("need at least 2 samples to split");

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(std::max(ds.classes, 1)));
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    Rng rng(seed);
    for (auto& members : by_class) rng.shuffle(members);

    // Largest-remainder allocation of round(f n) training slots across classes.
    const auto target = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const double exact = train_fraction * static_cast<double>(by_class[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < target && k < remainders.size(); ++k, ++assigned)
        ++quota[remainders[k].second];
    // Keep every class with two or more members present on both sides.
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const std::size_t size = by_class[c].size();
        if (size >= 2) quota[c] = std::clamp<std::size_t>(quota[c], 1, size - 1);
    }

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const auto& members = by_class[c];
        train_idx.insert(train_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
        test_idx.insert(test_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]), members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {subset(ds, train_idx), subset(ds, test_idx)};
}

// ---- metrics ------------------------------------------------------------

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw ShapeError("accuracy: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    if (pred.empty()) throw InvalidInput("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth, int classes) {
    if (pred.size() != truth.size())
        throw ShapeError("macro_f1: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    if (classes < 1) throw InvalidInput("macro_f1: class count must be >= 1");
    std::vector<double> tp(static_cast<std::size_t>(classes)), fp(tp.size()), fn(tp.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || pred[i] >= classes || truth[i] < 0 || truth[i] >= classes)
            throw InvalidInput("macro_f1: label outside [0, c)");
        const auto p = static_cast<std::size_t>(pred[i]);
        const auto t = static_cast<std::size_t>(truth[i]);
        if (p == t) {
            tp[p] += 1.0;
        } else {
            fp[p] += 1.0;
            fn[t] += 1.0;
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < tp.size(); ++c) {
        const double precision = tp[c] + fp[c] > 0.0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
        const double recall = tp[c] + fn[c] > 0.0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
        if (precision + recall > 0.0) total += 2.0 * precision * recall / (precision + recall);
    }
    return total / static_cast<double>(classes);
}

}  // namespace ngmn
