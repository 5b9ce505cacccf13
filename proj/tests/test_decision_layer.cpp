#include "helpers.hpp"
#include "ngmn/decision_layer.hpp"
#include "ngmn/numerics.hpp"
#include "ngmn/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngmn;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

SvmLabels random_labels(Index n, int c, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i < c ? i : rng.below(c));
    return SvmLabels::from_indices(y, c);
}

}  // namespace

TEST_CASE("SvmLabels") {
    const SvmLabels l = SvmLabels::from_indices({1, 0}, 2);
    CHECK(l.Ypm(0, 0) == -1.0);
    CHECK(l.Ypm(1, 0) == 1.0);
    CHECK(l.Ypm(0, 1) == 1.0);
    Matrix bad = Matrix::Zero(2, 1);
    CHECK_THROWS_AS(SvmLabels::from_one_hot(bad), InvalidInput);
}

TEST_CASE("sample_losses") {
    const SvmLabels one = SvmLabels::from_indices({0}, 1);
    const Matrix x = Matrix::Ones(1, 1);
    CHECK(sample_losses(Matrix::Constant(1, 1, 2.0), Vector::Zero(1), Matrix::Zero(1, 1), x, one)(0) ==
          doctest::Approx(1.0));

    const SvmLabels two = SvmLabels::from_indices({0}, 2);
    CHECK(sample_losses(Matrix::Zero(1, 2), Vector::Zero(2), Matrix::Zero(2, 1), x, two)(0) ==
          doctest::Approx(2.0));

    // Scores equal to y + y.m give zero loss.
    Matrix M(2, 1);
    M << 0.5, 2.0;
    Vector b(2);
    b << 1.5, -3.0;
    CHECK(sample_losses(Matrix::Zero(1, 2), b, M, x, two)(0) == 0.0);

    CHECK_THROWS_AS(sample_losses(Matrix::Zero(2, 2), Vector::Zero(2), Matrix::Zero(2, 1), x, two), ShapeError);
}

TEST_CASE("update_alpha closed form") {
    const AlphaUpdate a = update_alpha(vec({1, 2, 3}));
    CHECK(a.gamma == doctest::Approx(1.5));
    CHECK(a.alpha(0) == doctest::Approx(2.0 / 3.0));
    CHECK(a.alpha(1) == doctest::Approx(1.0 / 3.0));
    CHECK(a.alpha(2) == 0.0);

    const AlphaUpdate b = update_alpha(vec({0, 0, 1}));
    CHECK(b.gamma == doctest::Approx(1.0));
    CHECK(b.alpha(0) == doctest::Approx(0.5));
    CHECK(b.alpha(1) == doctest::Approx(0.5));
    CHECK(b.alpha(2) == 0.0);

    const AlphaUpdate c = update_alpha(vec({5, 5, 5}));
    for (Index i = 0; i < 3; ++i) CHECK(c.alpha(i) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(update_alpha(vec({1})), InvalidInput);
    CHECK_THROWS_AS(update_alpha(vec({1, -1})), InvalidInput);
}

TEST_CASE("update_alpha keeps positive mass when losses tie up to rounding") {
    Vector f = Vector::Constant(600, 0.1 + 0.2);
    f(17) = 0.3;
    const AlphaUpdate a = update_alpha(f);
    CHECK(a.alpha.sum() == doctest::Approx(1.0));
    CHECK((a.alpha.array() >= 0.0).all());
}

TEST_CASE("update_alpha lies on the simplex and matches the projection oracle") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Vector f = testing::gaussian(2 + static_cast<Index>(s % 20), 1, s).cwiseAbs();
        const AlphaUpdate a = update_alpha(f);
        Index worst = 0;
        f.maxCoeff(&worst);
        CHECK(std::abs(a.alpha.sum() - 1.0) <= 1e-10);
        CHECK((a.alpha.array() >= 0.0).all());
        CHECK(a.alpha(worst) == 0.0);
        CHECK(max_abs(a.alpha - oracle::simplex_projection(-f / (2.0 * a.gamma))) <= 1e-10);
    }
}

TEST_CASE("alpha_for_fixed_gamma is the simplex projection") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Vector f = testing::gaussian(15, 1, 50 + s).cwiseAbs();
        for (double gamma : {0.01, 1.0, 100.0})
            CHECK(max_abs(alpha_for_fixed_gamma(f, gamma) - oracle::simplex_projection(-f / (2.0 * gamma))) <= 1e-12);
    }
    CHECK_THROWS_AS(alpha_for_fixed_gamma(vec({1, 2}), 0.0), InvalidConfig);
}

TEST_CASE("update_weights_bias hand example") {
    Matrix X(1, 2);
    X << 1, -1;
    const WeightsBias wb = update_weights_bias(X, X, vec({0.5, 0.5}), 1.0);
    CHECK(wb.W(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(wb.b(0)) <= 1e-15);
}

TEST_CASE("update_weights_bias with zero target still satisfies the constraint") {
    const Matrix X = testing::gaussian(4, 10, 1);
    const Vector alpha = Vector::Constant(10, 0.1);
    const WeightsBias wb = update_weights_bias(X, Matrix::Zero(2, 10), alpha, 0.5);
    const Matrix A = oracle::explicit_constraint_matrix(X, alpha, 0.5);
    CHECK(max_abs(wb.W.transpose() * A * wb.W - Matrix::Identity(2, 2)) <= 1e-6);
    CHECK(max_abs(wb.b + wb.W.transpose() * X * alpha) <= 1e-12);
}

TEST_CASE("update_weights_bias dominates random feasible points") {
    const Index d = 6, c = 3, n = 25;
    const Matrix X = testing::gaussian(d, n, 2);
    const SvmLabels labels = random_labels(n, c, 3);
    const Vector alpha = update_alpha(testing::gaussian(n, 1, 4).cwiseAbs()).alpha;
    const WeightsBias wb = update_weights_bias(X, labels.Ypm, alpha, 0.5);
    const Matrix A = oracle::explicit_constraint_matrix(X, alpha, 0.5);
    CHECK(max_abs(wb.W.transpose() * A * wb.W - Matrix::Identity(c, c)) <= 1e-6);
    const double best = oracle::procrustes_trace(wb.W, X, alpha, labels.Ypm);
    double worst = INFINITY;
    for (const Matrix& W : oracle::random_feasible_manifold_points(spd_sqrt(A), c, 1000, 5))
        worst = std::min(worst, best - oracle::procrustes_trace(W, X, alpha, labels.Ypm));
    CHECK(worst >= -1e-9);
}

TEST_CASE("update_weights_bias needs at least as many features as classes") {
    CHECK_THROWS_AS(update_weights_bias(testing::gaussian(2, 6, 6), Matrix::Ones(3, 6), Vector::Constant(6, 1.0 / 6), 0.5),
                    ManifoldInfeasible);
}

TEST_CASE("update_slack") {
    const Matrix x = Matrix::Ones(1, 1);
    const SvmLabels y = SvmLabels::from_indices({0}, 2);
    CHECK(update_slack(Matrix::Zero(1, 2), vec({0.5, -0.2}), x, y).isZero());
    const Matrix M = update_slack(Matrix::Zero(1, 2), vec({2, -3}), x, y);
    CHECK(M(0, 0) == 1.0);
    CHECK(M(1, 0) == 2.0);
    CHECK(update_slack(Matrix::Zero(3, 2), Vector::Zero(2), testing::gaussian(3, 5, 7), random_labels(5, 2, 8)).isZero());
}

TEST_CASE("fit_decision_layer separates 1-D data") {
    // One feature cannot carry two orthonormal class directions, so the
    // points get a second, constant coordinate.
    Matrix line(1, 4);
    line << -1, -1.1, 1, 1.1;
    const SvmLabels labels = SvmLabels::from_indices({0, 0, 1, 1}, 2);
    CHECK_THROWS_AS(fit_decision_layer(line, labels, 0.5, DecisionConfig{}), ManifoldInfeasible);

    Matrix X = Matrix::Zero(2, 4);
    X.row(0) = line;
    const DecisionState s = fit_decision_layer(X, labels, 0.5, DecisionConfig{});
    CHECK(predict_decision(s, X) == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("fit_decision_layer loop contract and invariants") {
    const Matrix X = testing::gaussian(5, 30, 9);
    const SvmLabels labels = random_labels(30, 3, 10);
    DecisionConfig cfg;
    cfg.inner_iters = 1;
    std::vector<InnerPassRecord> trace;
    const DecisionState s = fit_decision_layer(X, labels, 0.5, cfg, &trace);
    CHECK(trace.size() == 1);
    CHECK(std::abs(s.alpha.sum() - 1.0) <= 1e-10);
    CHECK((s.alpha.array() >= 0.0).all());
    CHECK((s.M.array() >= 0.0).all());
    CHECK(s.W.rows() == 5);
    CHECK(s.W.cols() == 3);

    cfg.inner_iters = 0;
    CHECK_THROWS_AS(fit_decision_layer(X, labels, 0.5, cfg), InvalidConfig);
}

TEST_CASE("inner passes never raise the objective") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix X = testing::gaussian(6, 40, 20 + seed);
        const SvmLabels labels = random_labels(40, 3, 40 + seed);
        std::vector<InnerPassRecord> trace;
        DecisionConfig cfg;
        cfg.inner_iters = 4;
        fit_decision_layer(X, labels, 0.5, cfg, &trace);
        for (const auto& r : trace) CHECK(r.after_slack <= r.after_weights + 1e-9 * (1.0 + r.after_weights));
    }
}

TEST_CASE("a (W, b) then M pass with frozen alpha never raises the weighted objective") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix X = testing::gaussian(5, 20, 60 + seed);
        const SvmLabels labels = random_labels(20, 3, 120 + seed);
        const Vector alpha = update_alpha(testing::gaussian(20, 1, 180 + seed).cwiseAbs()).alpha;
        const double gamma = 0.7;
        // Feasible start: the closed form for a different slack.
        const Matrix M0 = testing::gaussian(3, 20, 240 + seed).cwiseAbs();
        const WeightsBias start = update_weights_bias(X, slack_target(labels, M0), alpha, 0.5);
        const Matrix M1 = update_slack(start.W, start.b, X, labels);
        const double before = oracle::weighted_svm_objective(start.W, start.b, M1, alpha, gamma, 0.5, X, labels.Ypm);
        const WeightsBias next = update_weights_bias(X, slack_target(labels, M1), alpha, 0.5);
        const Matrix M2 = update_slack(next.W, next.b, X, labels);
        const double after = oracle::weighted_svm_objective(next.W, next.b, M2, alpha, gamma, 0.5, X, labels.Ypm);
        CHECK(after <= before + 1e-9);
    }
}

TEST_CASE("fixed gamma mode and uniform weighting") {
    const Matrix X = testing::gaussian(4, 25, 11);
    const SvmLabels labels = random_labels(25, 2, 12);
    DecisionConfig cfg;
    cfg.gamma_mode = GammaMode::Fixed;
    cfg.gamma = 1e6;
    const DecisionState fixed = fit_decision_layer(X, labels, 0.5, cfg);
    CHECK(fixed.gamma == 1e6);
    CHECK((fixed.alpha.array() > 0.0).all());

    cfg.gamma_mode = GammaMode::SelfTuned;
    cfg.weighting = Weighting::Uniform;
    const DecisionState uniform = fit_decision_layer(X, labels, 0.5, cfg);
    CHECK(max_abs(uniform.alpha.array() - 1.0 / 25.0) <= 1e-15);

    cfg.gamma_mode = GammaMode::Fixed;
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("decision_scores and ties") {
    DecisionState s;
    s.W = Matrix::Zero(3, 2);
    s.b = vec({1, 0});
    CHECK(predict_decision(s, testing::gaussian(3, 4, 13)) == std::vector<int>(4, 0));
    s.b = vec({0.5, 0.5});
    CHECK(predict_decision(s, testing::gaussian(3, 2, 14)) == std::vector<int>(2, 0));
    CHECK_THROWS_AS(decision_scores(s, testing::gaussian(2, 2, 15)), ShapeError);
}
