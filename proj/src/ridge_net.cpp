#include "ngmn/ridge_net.hpp"

#include "ngmn/kernels.hpp"
#include "ngmn/numerics.hpp"
#include "ngmn/rng.hpp"

#include <cmath>

namespace ngmn {

void RidgeConfig::validate() const {
    if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0");
    if (widths.empty()) throw InvalidInput("layer widths must not be empty");
    for (Index w : widths)
        if (w < 1) throw InvalidConfig("layer widths must be >= 1");
    if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
    if (!(tol >= 0.0)) throw InvalidConfig("tol must be >= 0");
    activation.validate();
}

Matrix pre_activation(const Matrix& W, const Vector& b, const Matrix& H) {
    require_shape(W.rows() == H.rows(), "layer expects input dim " + std::to_string(W.rows()) +
                                            ", got " + shape_string(H));
    require_shape(b.size() == W.cols(), "bias length does not match layer width");
    Matrix Z = kernels::at_b(W, H);
    Z.colwise() += b;
    return Z;
}

Matrix forward_layer(const LayerParams& params, const Matrix& H_prev) {
    return apply(params.activation, pre_activation(params.W, params.b, H_prev));
}

Vector optimal_bias(const Matrix& W, const Matrix& H, const Matrix& T) {
    require_shape(T.cols() == H.cols(), "target and input sample counts differ");
    require_shape(T.rows() == W.cols(), "target rows do not match layer width");
    const Matrix residual = T - kernels::at_b(W, H);
    return residual.rowwise().sum() / static_cast<double>(H.cols());
}

Matrix ridge_weights(const Matrix& X, const Matrix& Y, double lambda) {
    if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0");
    require_shape(X.cols() == Y.cols(), "ridge_weights: sample counts differ");
    const Matrix Xt = X.transpose();
    Matrix A = kernels::gram(Xt);
    A.diagonal().array() += lambda;
    return spd_inverse(A) * kernels::at_b(Xt, Y.transpose());
}

double layer_objective(const Matrix& W, const Vector& b, const Matrix& H, const Matrix& T,
                       double lambda) {
    return (pre_activation(W, b, H) - T).squaredNorm() + lambda * W.squaredNorm();
}

RidgeSolver::RidgeSolver(const Matrix& H_prev, double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0");
    if (!H_prev.allFinite()) throw InvalidInput("ridge input has non-finite entries");
    const Vector mean = H_prev.rowwise().mean();
    centered_t_ = (H_prev.colwise() - mean).transpose();
    Matrix A = kernels::gram(centered_t_);
    A.diagonal().array() += lambda;
    inverse_ = spd_inverse(A);
}

LinearFit RidgeSolver::fit(const Matrix& H_prev, const Matrix& T) const {
    require_shape(H_prev.cols() == centered_t_.rows() && H_prev.rows() == centered_t_.cols(),
                  "ridge solver was built for a different input");
    require_shape(T.cols() == H_prev.cols(), "target has " + std::to_string(T.cols()) +
                                                 " samples, input has " +
                                                 std::to_string(H_prev.cols()));
    if (!T.allFinite()) throw InvalidInput("ridge target has non-finite entries");
    // X_C T_C^T == X_C T^T because C is idempotent and symmetric.
    LinearFit out;
    out.W = inverse_ * kernels::at_b(centered_t_, T.transpose());
    out.b = optimal_bias(out.W, H_prev, T);
    return out;
}

LinearFit fit_layer(const Matrix& H_prev, const Matrix& T, double lambda) {
    return RidgeSolver(H_prev, lambda).fit(H_prev, T);
}

Matrix backward_labels(const LayerParams& params, const Matrix& Y_tilde) {
    require_shape(Y_tilde.rows() == params.out_dim(),
                  "backward labels expect " + std::to_string(params.out_dim()) + " rows, got " +
                      shape_string(Y_tilde));
    Matrix shifted = Y_tilde;
    shifted.colwise() -= params.b;
    const Matrix Wt = params.W.transpose();
    return softmax_columns(kernels::at_b(Wt, shifted));
}

Matrix layer_target(const Activation& act, TargetSpace space, const Matrix& Y_tilde) {
    if (space == TargetSpace::Direct) return Y_tilde;
    return invert(act, Y_tilde);
}

std::vector<LayerParams> initialize_layers(Index input_dim, const std::vector<Index>& widths,
                                           const Activation& act, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LayerParams> layers;
    Index in = input_dim;
    for (Index out : widths) {
        const double s = std::sqrt(6.0 / static_cast<double>(in + out));
        LayerParams p{Matrix(in, out), Vector::Zero(out), act};
        for (Index j = 0; j < out; ++j)
            for (Index i = 0; i < in; ++i) p.W(i, j) = rng.uniform(-s, s);
        layers.push_back(std::move(p));
        in = out;
    }
    return layers;
}

std::vector<Matrix> forward_all(const std::vector<LayerParams>& layers, const Matrix& X) {
    std::vector<Matrix> hs;
    hs.reserve(layers.size() + 1);
    hs.push_back(X);
    for (const auto& layer : layers) hs.push_back(forward_layer(layer, hs.back()));
    return hs;
}

int validate_one_hot(const Matrix& Y, Index n) {
    require_shape(Y.cols() == n, "label matrix has " + std::to_string(Y.cols()) +
                                     " columns, expected " + std::to_string(n));
    if (Y.rows() < 2) throw InvalidInput("need at least 2 classes, got " + std::to_string(Y.rows()));
    for (Index j = 0; j < Y.cols(); ++j) {
        int ones = 0;
        for (Index i = 0; i < Y.rows(); ++i) {
            if (Y(i, j) == 1.0)
                ++ones;
            else if (Y(i, j) != 0.0)
                throw InvalidInput("label matrix is not one-hot at column " + std::to_string(j));
        }
        if (ones != 1)
            throw InvalidInput("label matrix is not one-hot at column " + std::to_string(j));
    }
    return static_cast<int>(Y.rows());
}

namespace {

double training_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace

RidgeTrainResult train_ridge_network(const Matrix& X, const Matrix& Y, const RidgeConfig& config,
                                     std::uint64_t seed) {
    config.validate();
    if (!X.allFinite()) throw InvalidInput("input has non-finite entries");
    const int classes = validate_one_hot(Y, X.cols());
    if (config.widths.back() != classes)
        throw InvalidInput("last layer width " + std::to_string(config.widths.back()) +
                           " must equal the class count " + std::to_string(classes));

    const auto truth = argmax_columns(Y);
    const double n = static_cast<double>(X.cols());
    RidgeTrainResult result;
    result.layers = initialize_layers(X.rows(), config.widths, config.activation, seed);
    auto& layers = result.layers;
    const RidgeSolver input_solver(X, config.lambda);

    double previous = 0.0;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const auto hs = forward_all(layers, X);
        Matrix labels = Y;
        double loss = 0.0;
        for (std::size_t l = layers.size(); l-- > 0;) {
            const Matrix target = layer_target(config.activation, config.target_space, labels);
            const LinearFit fit = l == 0 ? input_solver.fit(X, target)
                                         : fit_layer(hs[l], target, config.lambda);
            layers[l].W = fit.W;
            layers[l].b = fit.b;
            loss += layer_objective(fit.W, fit.b, hs[l], target, config.lambda) / n;
            if (l > 0) labels = backward_labels(layers[l], target);
        }
        const double acc = training_accuracy(predict_ridge(layers, X), truth);
        result.trace.push_back({iter, loss, acc});
        if (iter > 1 && std::abs(loss - previous) <= config.tol * std::abs(previous)) break;
        previous = loss;
    }
    return result;
}

std::vector<int> predict_ridge(const std::vector<LayerParams>& layers, const Matrix& X) {
    if (layers.empty()) throw InvalidInput("no layers to predict with");
    Matrix h = X;
    for (const auto& layer : layers) h = forward_layer(layer, h);
    return argmax_columns(h);
}

}  // namespace ngmn
