#pragma once

// Ridge feature layers topped by the manifold-constrained SVM head, trained
// jointly by alternating closed-form updates:
//
//   1. forward inference through the ridge layers;
//   2. fit the head on the top features;
//   3. seed labels from the head and refit the ridge layers top-down.
//
// Every update is a closed form. Only per-block monotonicity is guaranteed;
// the outer loop stops on a relative-loss tolerance or max_iter.

#include "ngmn/decision_layer.hpp"
#include "ngmn/ridge_net.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ngmn {

/// Label matrix handed to the top ridge layer from the head.
enum class TopTarget : std::uint8_t {
    SlackTarget = 0,  // G = Y + Y (.) M, the target the head fit; default
    Labels = 1,       // the +/-1 labels only
};

struct ModelConfig {
    RidgeConfig ridge;  // widths are the hidden widths; lambda is shared with the head
    DecisionConfig head;
    TopTarget top_target = TopTarget::SlackTarget;
    std::uint64_t seed = 0;

    void validate() const;
};

struct NetworkModel {
    std::vector<LayerParams> layers;
    DecisionState head;
    ModelConfig config;
    std::vector<TraceRow> trace;

    Index input_dim() const { return layers.empty() ? head.W.rows() : layers.front().in_dim(); }
    Index classes() const { return head.W.cols(); }
};

/// Per-iteration diagnostics beyond the trace.
struct TrainDiagnostics {
    std::vector<std::vector<InnerPassRecord>> head_passes;  // one list per outer iteration
};

NetworkModel train(const Matrix& X, const Matrix& Y, const ModelConfig& config,
                   TrainDiagnostics* diagnostics = nullptr);

/// Top-layer features for X.
Matrix features(const NetworkModel& model, const Matrix& X);

std::vector<int> predict(const NetworkModel& model, const Matrix& X);

// Binary model format, little-endian throughout:
//   "NGMN" | u16 version | config block | ridge layers | head | trace
// Matrices are (u32 rows, u32 cols, rows*cols f64 in row-major order).
inline constexpr std::uint16_t kModelFormatVersion = 1;

void save_model(const NetworkModel& model, std::ostream& sink);
NetworkModel load_model(std::istream& source);

void save_model_file(const NetworkModel& model, const std::string& path);
NetworkModel load_model_file(const std::string& path);

}  // namespace ngmn
