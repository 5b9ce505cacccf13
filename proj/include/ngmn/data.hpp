#pragma once

#include "ngmn/common.hpp"
#include "ngmn/decision_layer.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ngmn {

struct Dataset {
    Matrix X;                 // d x n
    std::vector<int> labels;  // n, each in [0, classes)
    int classes = 0;

    Index features() const { return X.rows(); }
    Index samples() const { return X.cols(); }
    Matrix one_hot() const { return ngmn::one_hot(labels, classes); }
    SvmLabels pm() const { return SvmLabels::from_indices(labels, classes); }
};

// ---- IDX (MNIST-style) ----------------------------------------------------

/// Parses an IDX image file (magic 0x00000803, u8 pixels) and label file
/// (magic 0x00000801). Either buffer may be gzip-compressed. Pixels are
/// flattened row-major and divided by 255.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// ---- CSV ------------------------------------------------------------------

/// Label column given by header name or zero-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// One row per sample, numeric cells, optional header row (detected when the
/// first row has a non-numeric cell). Labels are integers, remapped to 0..c-1
/// in sorted order of the original values.
Dataset parse_csv(std::istream& in, const LabelColumn& label_column,
                  const std::string& source_name = "<csv>");

Dataset load_csv(const std::string& path, const LabelColumn& label_column);

/// Writes label first, then features, with a header row.
void write_csv(const Dataset& ds, std::ostream& out);

/// Reads a whole file; gzip content is inflated transparently.
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

// ---- preprocessing --------------------------------------------------------

struct RowScaling {
    Vector min;
    Vector range;  // max - min; 0 for constant rows

    static RowScaling fit(const Matrix& X);
    /// Constant rows map to 0; values outside the fitted range are clamped.
    Matrix apply(const Matrix& X) const;
};

/// Min-max scales every feature row to [0, 1].
Dataset normalize_rows(Dataset ds);

/// Columns `indices` of ds, in the given order.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

/// Stratified seeded split; returns (train, test).
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// ---- metrics --------------------------------------------------------------

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Unweighted mean of per-class F1; a class with P + R = 0 contributes 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth, int classes);

// ---- synthetic benchmarks -------------------------------------------------

/// Isotropic Gaussian blobs: class centers uniform in [-center_box, center_box]^d,
/// per-class spread `stddev`, classes assigned round-robin.
Dataset make_blobs(Index n, Index d, int classes, double stddev, double center_box,
                   std::uint64_t seed);

/// The seeded 3-class benchmark used throughout the tests: n=600, d=10.
Dataset blobs_benchmark(std::uint64_t seed);

/// Breiman's 21-attribute waveform generator (the process behind the UCI
/// Waveform data): each class mixes two of three shifted triangular waves
/// with a uniform weight and adds unit Gaussian noise. Classes share a base
/// wave pairwise, so they overlap: the best attainable accuracy is about 86%.
Dataset make_waveform(Index n, std::uint64_t seed);

}  // namespace ngmn
