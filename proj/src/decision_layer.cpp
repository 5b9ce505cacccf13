#include "ngmn/decision_layer.hpp"

#include "ngmn/kernels.hpp"
#include "ngmn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ngmn {

namespace {

constexpr double kDegenerateGamma = 1e-12;

void check_alpha(const Vector& alpha, Index n) {
    require_shape(alpha.size() == n, "alpha has length " + std::to_string(alpha.size()) +
                                         ", expected " + std::to_string(n));
    if (!alpha.allFinite() || (alpha.array() < 0.0).any())
        throw InvalidInput("alpha must be finite and non-negative");
    if (!(alpha.sum() > 0.0)) throw InvalidInput("alpha must have positive mass");
}

void check_scores_shape(const Matrix& W, const Vector& b, const Matrix& X, const SvmLabels& labels) {
    require_shape(W.rows() == X.rows(), "head expects input dim " + std::to_string(W.rows()) +
                                            ", got " + shape_string(X));
    require_shape(b.size() == W.cols(), "head bias length does not match class count");
    require_shape(labels.Ypm.rows() == W.cols() && labels.Ypm.cols() == X.cols(),
                  "labels " + shape_string(labels.Ypm) + " do not match scores " +
                      std::to_string(W.cols()) + "x" + std::to_string(X.cols()));
}

Matrix raw_scores(const Matrix& W, const Vector& b, const Matrix& X) {
    Matrix S = kernels::at_b(W, X);
    S.colwise() += b;
    return S;
}

}  // namespace

SvmLabels SvmLabels::from_one_hot(const Matrix& Y) {
    for (Index j = 0; j < Y.cols(); ++j) {
        if (Y.col(j).sum() != 1.0 || ((Y.col(j).array() != 0.0) && (Y.col(j).array() != 1.0)).any())
            throw InvalidInput("label matrix is not one-hot at column " + std::to_string(j));
    }
    return SvmLabels{(2.0 * Y.array() - 1.0).matrix()};
}

SvmLabels SvmLabels::from_indices(const std::vector<int>& labels, int classes) {
    return from_one_hot(one_hot(labels, classes));
}

void DecisionConfig::validate() const {
    if (inner_iters < 1) throw InvalidConfig("inner_iters must be >= 1");
    if (gamma_mode == GammaMode::Fixed && !(gamma > 0.0))
        throw InvalidConfig("fixed gamma must be > 0");
}

Vector sample_losses(const Matrix& W, const Vector& b, const Matrix& M, const Matrix& X,
                     const SvmLabels& labels) {
    check_scores_shape(W, b, X, labels);
    require_shape(M.rows() == labels.Ypm.rows() && M.cols() == labels.Ypm.cols(),
                  "slack matrix shape " + shape_string(M) + " does not match labels");
    const Matrix residual = raw_scores(W, b, X) - slack_target(labels, M);
    return residual.colwise().squaredNorm().transpose();
}

Vector sample_losses(const DecisionState& state, const Matrix& X, const SvmLabels& labels) {
    return sample_losses(state.W, state.b, state.M, X, labels);
}

AlphaUpdate update_alpha(const Vector& f) {
    const Index n = f.size();
    if (n < 2) throw InvalidInput("update_alpha needs at least 2 samples");
    if (!f.allFinite() || (f.array() < 0.0).any())
        throw InvalidInput("sample losses must be finite and non-negative");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&f](Index a, Index b) { return f(a) < f(b); });

    // gamma = ((n-1) f_max - sum of the rest) / 2, summed as gaps so that a
    // positive gamma always comes with some positive alpha.
    const double largest = f(order.back());
    double gaps = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) gaps += largest - f(order[k]);
    const double gamma = 0.5 * gaps;

    AlphaUpdate out;
    if (gamma <= kDegenerateGamma) {
        out.alpha = Vector::Constant(n, 1.0 / static_cast<double>(n));
        out.gamma = 0.0;
        return out;
    }
    out.gamma = gamma;
    out.alpha = ((largest - f.array()).max(0.0) / (2.0 * gamma)).matrix();
    return out;
}

Vector alpha_for_fixed_gamma(const Vector& f, double gamma) {
    if (!(gamma > 0.0)) throw InvalidConfig("fixed gamma must be > 0");
    if (f.size() < 1) throw InvalidInput("empty loss vector");
    const Vector v = -f / (2.0 * gamma);
    // Threshold tau with sum (v - tau)_+ = 1, by bisection on [min v - 1, max v].
    double lo = v.minCoeff() - 1.0;
    double hi = v.maxCoeff();
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double mass = (v.array() - mid).max(0.0).sum();
        (mass > 1.0 ? lo : hi) = mid;
    }
    // Exact threshold on the recovered active set.
    double active_sum = 0.0;
    Index active = 0;
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) > lo) {
            active_sum += v(i);
            ++active;
        }
    }
    const double tau = (active_sum - 1.0) / static_cast<double>(active);
    return (v.array() - tau).max(0.0).matrix();
}

Matrix slack_target(const SvmLabels& labels, const Matrix& M, SlackSign sign) {
    require_shape(M.rows() == labels.Ypm.rows() && M.cols() == labels.Ypm.cols(),
                  "slack matrix shape " + shape_string(M) + " does not match labels");
    const double s = sign == SlackSign::Plus ? 1.0 : -1.0;
    return (labels.Ypm.array() + s * labels.Ypm.array() * M.array()).matrix();
}

WeightsBias update_weights_bias(const Matrix& X, const Matrix& G, const Vector& alpha,
                                double lambda) {
    if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0");
    require_shape(G.cols() == X.cols(), "target has " + std::to_string(G.cols()) +
                                            " samples, input has " + std::to_string(X.cols()));
    check_alpha(alpha, X.cols());
    const Index d = X.rows();
    const Index c = G.rows();
    if (d < c)
        throw ManifoldInfeasible("head input dim " + std::to_string(d) +
                                 " is smaller than class count " + std::to_string(c));
    if (!X.allFinite() || !G.allFinite()) throw InvalidInput("head inputs must be finite");

    const double mass = alpha.sum();
    const Vector x_mean = X * alpha / mass;
    const Vector g_mean = G * alpha / mass;
    // X C^ D C^T X^T is the alpha-weighted scatter about the weighted mean.
    const Matrix Xc_t = (X.colwise() - x_mean).transpose();
    const Matrix Gc_t = (G.colwise() - g_mean).transpose();

    Matrix A = kernels::weighted_gram(Xc_t, alpha);
    A.diagonal().array() += lambda;
    const Matrix cross = kernels::at_w_b(Xc_t, alpha, Gc_t);

    const Matrix S = spd_sqrt(A);
    const Matrix S_inv = spd_inverse(S);
    const SvdResult p = svd(S_inv * cross);

    WeightsBias out;
    out.W = S_inv * p.U.leftCols(c) * p.V.transpose();
    out.b = (G * alpha - out.W.transpose() * (X * alpha)) / mass;
    return out;
}

Matrix update_slack(const Matrix& W, const Vector& b, const Matrix& X, const SvmLabels& labels) {
    check_scores_shape(W, b, X, labels);
    return (labels.Ypm.array() * raw_scores(W, b, X).array() - 1.0).max(0.0).matrix();
}

double decision_objective(const DecisionState& state, const Matrix& X, const SvmLabels& labels) {
    const Vector f = sample_losses(state, X, labels);
    return state.alpha.dot(f) + state.lambda * state.W.squaredNorm() +
           state.gamma * state.alpha.squaredNorm();
}

DecisionState fit_decision_layer(const Matrix& X, const SvmLabels& labels, double lambda,
                                 const DecisionConfig& config,
                                 std::vector<InnerPassRecord>* trace) {
    config.validate();
    require_shape(labels.Ypm.cols() == X.cols(), "labels and features disagree on sample count");
    const Index n = X.cols();
    const Index c = labels.classes();

    DecisionState state;
    state.lambda = lambda;
    state.gamma_mode = config.gamma_mode;
    state.gamma = config.gamma_mode == GammaMode::Fixed ? config.gamma : 0.0;
    state.alpha = Vector::Constant(n, 1.0 / static_cast<double>(n));
    state.M = Matrix::Zero(c, n);
    auto first = update_weights_bias(X, labels.Ypm, state.alpha, lambda);
    state.W = std::move(first.W);
    state.b = std::move(first.b);

    for (int pass = 0; pass < config.inner_iters; ++pass) {
        if (config.weighting == Weighting::Adaptive) {
            const Vector f = sample_losses(state, X, labels);
            if (config.gamma_mode == GammaMode::SelfTuned) {
                auto upd = update_alpha(f);
                state.alpha = std::move(upd.alpha);
                state.gamma = upd.gamma;
            } else {
                state.alpha = alpha_for_fixed_gamma(f, config.gamma);
            }
        }
        auto wb = update_weights_bias(X, slack_target(labels, state.M), state.alpha, lambda);
        state.W = std::move(wb.W);
        state.b = std::move(wb.b);
        InnerPassRecord rec;
        if (trace) rec.after_weights = decision_objective(state, X, labels);
        state.M = update_slack(state.W, state.b, X, labels);
        if (trace) {
            rec.after_slack = decision_objective(state, X, labels);
            trace->push_back(rec);
        }
    }
    return state;
}

Matrix decision_scores(const DecisionState& state, const Matrix& X) {
    require_shape(state.W.rows() == X.rows(), "head expects input dim " +
                                                  std::to_string(state.W.rows()) + ", got " +
                                                  shape_string(X));
    return raw_scores(state.W, state.b, X);
}

std::vector<int> predict_decision(const DecisionState& state, const Matrix& X) {
    return argmax_columns(decision_scores(state, X));
}

}  // namespace ngmn
