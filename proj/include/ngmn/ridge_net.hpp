#pragma once

// Ridge-regression layers trained without gradients.
//
// A layer computes H = sigma(W^T H_prev + b 1^T). Fitting regresses W, b onto
// a target in pre-activation space with an F-norm penalty on W; labels are
// carried down the stack by the low-rank reconstruction W (Y - b 1^T) mapped
// through a column softmax.

#include "ngmn/activations.hpp"
#include "ngmn/common.hpp"

#include <cstdint>
#include <vector>

namespace ngmn {

struct LayerParams {
    Matrix W;  // d_in x d_out; applied as W^T H
    Vector b;  // d_out
    Activation activation;

    Index in_dim() const { return W.rows(); }
    Index out_dim() const { return W.cols(); }
};

/// What each layer regresses onto.
enum class TargetSpace : std::uint8_t {
    InverseActivation = 0,  // sigma^{-1}(clip(Y~)); default
    Direct = 1,             // Y~ itself
};

struct RidgeConfig {
    double lambda = 0.5;
    std::vector<Index> widths;  // output width of each layer, in order
    Activation activation = Activation::sigmoid();
    TargetSpace target_space = TargetSpace::InverseActivation;
    int max_iter = 30;
    double tol = 1e-4;

    void validate() const;
};

struct LinearFit {
    Matrix W;
    Vector b;
};

struct TraceRow {
    int iter = 0;
    double loss = 0.0;
    double train_acc = 0.0;
};

/// sigma(W^T H_prev + b 1^T).
Matrix forward_layer(const LayerParams& params, const Matrix& H_prev);

/// W^T H + b 1^T without the activation.
Matrix pre_activation(const Matrix& W, const Vector& b, const Matrix& H);

/// Bias minimizing the ridge objective for fixed W: (T - W^T H) 1 / n.
Vector optimal_bias(const Matrix& W, const Matrix& H, const Matrix& T);

/// Uncentered ridge weights (X X^T + lambda I)^{-1} X Y^T.
Matrix ridge_weights(const Matrix& X, const Matrix& Y, double lambda);

/// ||W^T H + b 1^T - T||_F^2 + lambda ||W||_F^2.
double layer_objective(const Matrix& W, const Vector& b, const Matrix& H, const Matrix& T,
                       double lambda);

/// Ridge solver for a fixed input matrix. The inverse of the centered Gram
/// matrix is computed once, so refitting against new targets is cheap.
/// `fit` must be given the same input the solver was built from.
class RidgeSolver {
public:
    RidgeSolver(const Matrix& H_prev, double lambda);

    LinearFit fit(const Matrix& H_prev, const Matrix& T) const;

    double lambda() const { return lambda_; }

private:
    double lambda_;
    Matrix centered_t_;  // (H_prev C)^T, n x d_in
    Matrix inverse_;     // (H_prev C C^T H_prev^T + lambda I)^{-1}
};

/// Closed-form fit of one layer: centered ridge for W, then the bias.
LinearFit fit_layer(const Matrix& H_prev, const Matrix& T, double lambda);

/// softmax_columns(W (Y~ - b 1^T)); d_in x n.
Matrix backward_labels(const LayerParams& params, const Matrix& Y_tilde);

/// Regression target for a layer given its label matrix Y~.
Matrix layer_target(const Activation& act, TargetSpace space, const Matrix& Y_tilde);

/// Glorot-uniform weights, zero biases.
std::vector<LayerParams> initialize_layers(Index input_dim, const std::vector<Index>& widths,
                                           const Activation& act, std::uint64_t seed);

/// Outputs of every layer; element 0 is the input itself.
std::vector<Matrix> forward_all(const std::vector<LayerParams>& layers, const Matrix& X);

/// Checks Y is c x n one-hot with c >= 2; returns c.
int validate_one_hot(const Matrix& Y, Index n);

struct RidgeTrainResult {
    std::vector<LayerParams> layers;
    std::vector<TraceRow> trace;
};

/// Alternating forward inference and top-down closed-form refits.
/// `config.widths` must end at the class count.
RidgeTrainResult train_ridge_network(const Matrix& X, const Matrix& Y, const RidgeConfig& config,
                                     std::uint64_t seed);

/// Argmax of the final layer output; ties go to the lowest class.
std::vector<int> predict_ridge(const std::vector<LayerParams>& layers, const Matrix& X);

}  // namespace ngmn
