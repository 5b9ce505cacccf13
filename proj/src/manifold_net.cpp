#include "ngmn/manifold_net.hpp"

#include <cmath>

namespace ngmn {

void ModelConfig::validate() const {
    ridge.validate();
    head.validate();
}

namespace {

double fraction_correct(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

// Labels handed to the top ridge layer: softmax(W_head (Y~ - b 1^T)).
Matrix head_backward_labels(const DecisionState& head, const SvmLabels& labels, TopTarget mode) {
    const Matrix top = mode == TopTarget::SlackTarget ? slack_target(labels, head.M) : labels.Ypm;
    const LayerParams as_layer{head.W, head.b, Activation::identity()};
    return backward_labels(as_layer, top);
}

}  // namespace

NetworkModel train(const Matrix& X, const Matrix& Y, const ModelConfig& config,
                   TrainDiagnostics* diagnostics) {
    config.validate();
    if (!X.allFinite()) throw InvalidInput("input has non-finite entries");
    const int classes = validate_one_hot(Y, X.cols());
    if (config.ridge.widths.back() < classes)
        throw ManifoldInfeasible("top hidden width " + std::to_string(config.ridge.widths.back()) +
                                 " is smaller than class count " + std::to_string(classes));

    const SvmLabels labels = SvmLabels::from_one_hot(Y);
    const auto truth = argmax_columns(Y);
    const RidgeConfig& rc = config.ridge;
    const double n = static_cast<double>(X.cols());

    NetworkModel model;
    model.config = config;
    model.layers = initialize_layers(X.rows(), rc.widths, rc.activation, config.seed);
    auto& layers = model.layers;
    const RidgeSolver input_solver(X, rc.lambda);

    double previous = 0.0;
    for (int iter = 1; iter <= rc.max_iter; ++iter) {
        const auto hs = forward_all(layers, X);
        std::vector<InnerPassRecord> passes;
        const DecisionState head =
            fit_decision_layer(hs.back(), labels, rc.lambda, config.head, &passes);
        const double acc = fraction_correct(predict_decision(head, hs.back()), truth);
        double loss = decision_objective(head, hs.back(), labels);

        Matrix layer_labels = head_backward_labels(head, labels, config.top_target);
        for (std::size_t l = layers.size(); l-- > 0;) {
            const Matrix target = layer_target(rc.activation, rc.target_space, layer_labels);
            const LinearFit fit =
                l == 0 ? input_solver.fit(X, target) : fit_layer(hs[l], target, rc.lambda);
            layers[l].W = fit.W;
            layers[l].b = fit.b;
            loss += layer_objective(fit.W, fit.b, hs[l], target, rc.lambda) / n;
            if (l > 0) layer_labels = backward_labels(layers[l], target);
        }

        model.trace.push_back({iter, loss, acc});
        if (diagnostics) diagnostics->head_passes.push_back(std::move(passes));
        if (iter > 1 && std::abs(loss - previous) <= rc.tol * std::abs(previous)) break;
        previous = loss;
    }

    // The last sweep moved the ridge layers; refit the head on their output.
    model.head = fit_decision_layer(forward_all(layers, X).back(), labels, rc.lambda, config.head);
    return model;
}

Matrix features(const NetworkModel& model, const Matrix& X) {
    require_shape(X.rows() == model.input_dim(), "model expects " +
                                                     std::to_string(model.input_dim()) +
                                                     " features, got " + std::to_string(X.rows()));
    Matrix h = X;
    for (const auto& layer : model.layers) h = forward_layer(layer, h);
    return h;
}

std::vector<int> predict(const NetworkModel& model, const Matrix& X) {
    return predict_decision(model.head, features(model, X));
}

}  // namespace ngmn
