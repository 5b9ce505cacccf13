#include "ngmn/oracle.hpp"

#include "ngmn/ridge_net.hpp"
#include "ngmn/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace ngmn::oracle {

Vector simplex_projection(const Vector& v) {
    const Index n = v.size();
    if (n == 0) return v;
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double running = 0.0;
    double theta = 0.0;
    for (Index k = 0; k < n; ++k) {
        running += sorted[static_cast<std::size_t>(k)];
        const double t = (running - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

double fd_stationarity(const std::function<double(const Vector&)>& objective, const Vector& point,
                       double step) {
    Vector x = point;
    double sq = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double keep = x(i);
        x(i) = keep + step;
        const double up = objective(x);
        x(i) = keep - step;
        const double down = objective(x);
        x(i) = keep;
        const double g = (up - down) / (2.0 * step);
        sq += g * g;
    }
    return std::sqrt(sq);
}

std::vector<Matrix> random_feasible_manifold_points(const Matrix& S, Index classes, std::size_t count,
                                                    std::uint64_t seed) {
    const Index d = S.rows();
    if (d < classes) throw ManifoldInfeasible("random feasible points need d >= c");
    const Matrix S_inv = S.inverse();
    Rng rng(seed);
    std::vector<Matrix> points;
    points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Matrix gaussian(d, classes);
        for (Index j = 0; j < classes; ++j)
            for (Index i = 0; i < d; ++i) gaussian(i, j) = rng.normal();
        const Eigen::HouseholderQR<Matrix> qr(gaussian);
        const Matrix Q = qr.householderQ() * Matrix::Identity(d, classes);
        points.push_back(S_inv * Q);
    }
    return points;
}

double ridge_objective(const Matrix& W, const Vector& b, const Matrix& X, const Matrix& T, double lambda) {
    const Matrix residual = (W.transpose() * X).colwise() + b - T;
    return residual.squaredNorm() + lambda * W.squaredNorm();
}

double weighted_svm_objective(const Matrix& W, const Vector& b, const Matrix& M, const Vector& alpha,
                              double gamma, double lambda, const Matrix& X, const Matrix& Ypm) {
    double total = 0.0;
    for (Index i = 0; i < X.cols(); ++i) {
        const Vector r = W.transpose() * X.col(i) + b - Ypm.col(i) - Ypm.col(i).cwiseProduct(M.col(i));
        total += alpha(i) * r.squaredNorm();
    }
    return total + lambda * W.squaredNorm() + gamma * alpha.squaredNorm();
}

namespace {

Matrix explicit_weighted_scatter(const Vector& alpha) {
    const Index n = alpha.size();
    const double s = alpha.sum();
    const Matrix C_hat = Matrix::Identity(n, n) - alpha * Vector::Ones(n).transpose() / s;
    return C_hat * alpha.asDiagonal() * C_hat.transpose();
}

}  // namespace

Matrix explicit_constraint_matrix(const Matrix& X, const Vector& alpha, double lambda) {
    Matrix A = X * explicit_weighted_scatter(alpha) * X.transpose();
    A.diagonal().array() += lambda;
    return A;
}

double procrustes_trace(const Matrix& W, const Matrix& X, const Vector& alpha, const Matrix& G) {
    return (W.transpose() * X * explicit_weighted_scatter(alpha) * G.transpose()).trace();
}

GSignReport g_sign_probe(const Matrix& X, const SvmLabels& labels, const Vector& alpha, double lambda,
                         const Matrix& M) {
    GSignReport report;
    const Matrix& Y = labels.Ypm;
    for (SlackSign sign : {SlackSign::Plus, SlackSign::Minus}) {
        const double s = sign == SlackSign::Plus ? 1.0 : -1.0;
        const Matrix G = (Y.array() + s * Y.array() * M.array()).matrix();
        const WeightsBias wb = update_weights_bias(X, G, alpha, lambda);
        const double value = weighted_svm_objective(wb.W, wb.b, M, alpha, 0.0, lambda, X, Y);
        (sign == SlackSign::Plus ? report.objective_plus : report.objective_minus) = value;
    }
    const double scale = std::max({1.0, std::abs(report.objective_plus), std::abs(report.objective_minus)});
    report.winner = report.objective_plus <= report.objective_minus ? SlackSign::Plus : SlackSign::Minus;
    report.strict = std::abs(report.objective_plus - report.objective_minus) > 1e-12 * scale;
    return report;
}

// ---- verification suite -------------------------------------------------

namespace {

constexpr double kStationarityTol = 1e-6;
constexpr double kFdStep = 1e-5;

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

Index draw(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

Vector pack(const Matrix& W, const Vector& b) {
    Vector v(W.size() + b.size());
    v << Eigen::Map<const Vector>(W.data(), W.size()), b;
    return v;
}

struct DecisionInstance {
    Matrix X;
    SvmLabels labels;
    Vector alpha;
    double lambda = 0.5;
};

DecisionInstance random_decision_instance(Rng& rng) {
    DecisionInstance inst;
    const Index c = draw(rng, 2, 4);
    const Index d = draw(rng, c, 8);
    const Index n = draw(rng, 6, 30);
    inst.X = gaussian_matrix(rng, d, n);
    std::vector<int> lab(static_cast<std::size_t>(n));
    for (auto& l : lab) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(c)));
    inst.labels = SvmLabels::from_indices(lab, static_cast<int>(c));
    Vector f(n);
    for (Index i = 0; i < n; ++i) f(i) = rng.uniform(0.0, 5.0);
    inst.alpha = update_alpha(f).alpha;
    inst.lambda = std::ldexp(1.0, static_cast<int>(draw(rng, -3, 3)));
    return inst;
}

Matrix random_slack(Rng& rng, Index c, Index n) {
    Matrix M(c, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < c; ++i) M(i, j) = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 2.0);
    return M;
}

template <class Body>
CheckResult timed(const std::string& name, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r{name, false, "", 0.0};
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string fmt_worst(const char* label, double worst, double bound) {
    std::ostringstream s;
    s.precision(3);
    s << label << " worst " << std::scientific << worst << " (bound " << bound << ")";
    return s.str();
}

}  // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    out.push_back(timed("fd_oracle_self_check", [&](CheckResult& r) {
        const auto quad = [](const Vector& x) { return (x(0) - 3.0) * (x(0) - 3.0); };
        const double at_min = fd_stationarity(quad, Vector::Constant(1, 3.0), kFdStep);
        const double at_zero = fd_stationarity(quad, Vector::Constant(1, 0.0), kFdStep);
        r.pass = at_min <= 1e-8 && std::abs(at_zero - 6.0) <= 1e-6;
        r.detail = "grad at minimizer " + std::to_string(at_min) + ", at 0 " + std::to_string(at_zero);
    }));

    out.push_back(timed("lemma1_bias_stationarity", [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Index din = draw(rng, 1, 10), dout = draw(rng, 1, 10), n = draw(rng, 2, 40);
            const Matrix H = gaussian_matrix(rng, din, n), T = gaussian_matrix(rng, dout, n);
            const Matrix W = gaussian_matrix(rng, din, dout);
            const double lambda = std::ldexp(1.0, static_cast<int>(draw(rng, -3, 3)));
            const Vector b = optimal_bias(W, H, T);
            const auto obj = [&](const Vector& bb) { return ridge_objective(W, bb, H, T, lambda); };
            const double scale = 1.0 + std::abs(obj(b));
            worst = std::max(worst, fd_stationarity(obj, b, kFdStep) / scale);
        }
        r.pass = worst <= kStationarityTol;
        r.detail = fmt_worst("scaled gradient norm", worst, kStationarityTol) + " over 100 instances";
    }));

    out.push_back(timed("lemma2_weights_stationarity", [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Index din = draw(rng, 1, 10), dout = draw(rng, 1, 10), n = draw(rng, 2, 40);
            const Matrix X = gaussian_matrix(rng, din, n), Y = gaussian_matrix(rng, dout, n);
            const double lambda = std::ldexp(1.0, static_cast<int>(draw(rng, -3, 3)));
            const Matrix W = ridge_weights(X, Y, lambda);
            const Vector zero = Vector::Zero(dout);
            const auto obj = [&](const Vector& w) {
                return ridge_objective(Eigen::Map<const Matrix>(w.data(), din, dout), zero, X, Y, lambda);
            };
            const Vector w = Eigen::Map<const Vector>(W.data(), W.size());
            const double scale = 1.0 + std::abs(obj(w));
            worst = std::max(worst, fd_stationarity(obj, w, kFdStep) / scale);
        }
        r.pass = worst <= kStationarityTol;
        r.detail = fmt_worst("scaled gradient norm", worst, kStationarityTol) + " over 100 instances";
    }));

    out.push_back(timed("fit_layer_stationarity", [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Index din = draw(rng, 1, 10), dout = draw(rng, 1, 10), n = draw(rng, 2, 40);
            const Matrix H = gaussian_matrix(rng, din, n), T = gaussian_matrix(rng, dout, n);
            const double lambda = std::ldexp(1.0, static_cast<int>(draw(rng, -3, 3)));
            const LinearFit fit = fit_layer(H, T, lambda);
            const auto obj = [&](const Vector& p) {
                const Eigen::Map<const Matrix> W(p.data(), din, dout);
                const Eigen::Map<const Vector> b(p.data() + din * dout, dout);
                return ridge_objective(W, b, H, T, lambda);
            };
            const Vector p = pack(fit.W, fit.b);
            const double scale = 1.0 + std::abs(obj(p));
            worst = std::max(worst, fd_stationarity(obj, p, kFdStep) / scale);
        }
        r.pass = worst <= kStationarityTol;
        r.detail = fmt_worst("scaled gradient norm", worst, kStationarityTol) + " over 100 instances";
    }));

    out.push_back(timed("theorem1_alpha_equals_projection", [&](CheckResult& r) {
        double worst = 0.0;
        bool simplex_ok = true;
        for (int k = 0; k < 100; ++k) {
            const Index n = draw(rng, 2, 50);
            Vector f(n);
            for (Index i = 0; i < n; ++i) f(i) = k % 4 == 0 ? std::floor(rng.uniform(0.0, 4.0)) : rng.uniform(0.0, 10.0);
            if ((f.array() == f(0)).all()) f(0) += 1.0;
            const AlphaUpdate upd = update_alpha(f);
            const Vector proj = simplex_projection(-f / (2.0 * upd.gamma));
            worst = std::max(worst, (upd.alpha - proj).cwiseAbs().maxCoeff());
            Index top = 0;
            f.maxCoeff(&top);
            simplex_ok = simplex_ok && std::abs(upd.alpha.sum() - 1.0) <= 1e-10 &&
                         (upd.alpha.array() >= 0.0).all() && upd.alpha(top) == 0.0;
        }
        r.pass = worst <= 1e-10 && simplex_ok;
        r.detail = fmt_worst("|alpha - projection|", worst, 1e-10) + (simplex_ok ? "" : "; simplex violated");
    }));

    out.push_back(timed("theorem2_manifold_constraint", [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const DecisionInstance inst = random_decision_instance(rng);
            const Matrix M = random_slack(rng, inst.labels.classes(), inst.X.cols());
            const Matrix G = slack_target(inst.labels, M);
            const WeightsBias wb = update_weights_bias(inst.X, G, inst.alpha, inst.lambda);
            const Matrix A = explicit_constraint_matrix(inst.X, inst.alpha, inst.lambda);
            const Index c = inst.labels.classes();
            worst = std::max(worst, (wb.W.transpose() * A * wb.W - Matrix::Identity(c, c)).cwiseAbs().maxCoeff());
        }
        r.pass = worst <= 1e-6;
        r.detail = fmt_worst("|W^T A W - I|", worst, 1e-6) + " over 50 instances";
    }));

    out.push_back(timed("lemma3_procrustes_dominance", [&](CheckResult& r) {
        double worst_gap = -1e300;
        for (int k = 0; k < 50; ++k) {
            const DecisionInstance inst = random_decision_instance(rng);
            const Matrix M = random_slack(rng, inst.labels.classes(), inst.X.cols());
            const Matrix G = slack_target(inst.labels, M);
            const WeightsBias wb = update_weights_bias(inst.X, G, inst.alpha, inst.lambda);
            const Matrix A = explicit_constraint_matrix(inst.X, inst.alpha, inst.lambda);
            const Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
            const Matrix S = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                             eig.eigenvectors().transpose();
            const double best = procrustes_trace(wb.W, inst.X, inst.alpha, G);
            const Matrix K = inst.X * explicit_weighted_scatter(inst.alpha) * G.transpose();
            for (const Matrix& W : random_feasible_manifold_points(S, inst.labels.classes(), 1000, rng.below(1u << 30)))
                worst_gap = std::max(worst_gap, (W.transpose() * K).trace() - best);
        }
        r.pass = worst_gap <= 1e-9;
        r.detail = fmt_worst("random minus closed-form trace", worst_gap, 1e-9) + " over 50 x 1000 points";
    }));

    out.push_back(timed("eq23_slack_kkt", [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const DecisionInstance inst = random_decision_instance(rng);
            const Index c = inst.labels.classes();
            const Matrix W = gaussian_matrix(rng, inst.X.rows(), c);
            const Vector b = gaussian_matrix(rng, c, 1);
            const Matrix M = update_slack(W, b, inst.X, inst.labels);
            const Matrix margin =
                (inst.labels.Ypm.array() * ((W.transpose() * inst.X).colwise() + b).array() - 1.0).matrix();
            const double negativity = std::max(0.0, -M.minCoeff());
            const double below = std::max(0.0, (margin - M).maxCoeff());
            const double complementarity = ((M - margin).array() * M.array()).abs().maxCoeff();
            worst = std::max({worst, negativity, below, complementarity});
        }
        r.pass = worst <= 1e-10;
        r.detail = fmt_worst("KKT violation", worst, 1e-10) + " over 50 instances";
    }));

    out.push_back(timed("block_monotonicity", [&](CheckResult& r) {
        double worst = -1e300;
        for (int k = 0; k < 50; ++k) {
            const DecisionInstance inst = random_decision_instance(rng);
            const Index c = inst.labels.classes(), n = inst.X.cols();
            const double gamma = rng.uniform(0.1, 2.0);
            const Matrix& Y = inst.labels.Ypm;
            // Feasible starting point for this alpha, fitted against a different slack.
            const WeightsBias start =
                update_weights_bias(inst.X, slack_target(inst.labels, random_slack(rng, c, n)), inst.alpha, inst.lambda);
            const Matrix M0 = random_slack(rng, c, n);
            const double j0 = weighted_svm_objective(start.W, start.b, M0, inst.alpha, gamma, inst.lambda, inst.X, Y);
            const WeightsBias wb = update_weights_bias(inst.X, slack_target(inst.labels, M0), inst.alpha, inst.lambda);
            const double j1 = weighted_svm_objective(wb.W, wb.b, M0, inst.alpha, gamma, inst.lambda, inst.X, Y);
            const Matrix M1 = update_slack(wb.W, wb.b, inst.X, inst.labels);
            const double j2 = weighted_svm_objective(wb.W, wb.b, M1, inst.alpha, gamma, inst.lambda, inst.X, Y);
            worst = std::max({worst, j1 - j0, j2 - j1});
        }
        r.pass = worst <= 1e-9;
        r.detail = fmt_worst("largest objective increase", worst, 1e-9) + " over 50 instances";
    }));

    out.push_back(timed("g_sign_probe", [&](CheckResult& r) {
        int plus_wins = 0;
        for (int k = 0; k < 20; ++k) {
            const DecisionInstance inst = random_decision_instance(rng);
            Matrix M = random_slack(rng, inst.labels.classes(), inst.X.cols());
            M(0, 0) = 1.0;
            const GSignReport rep = g_sign_probe(inst.X, inst.labels, inst.alpha, inst.lambda, M);
            plus_wins += rep.winner == SlackSign::Plus && rep.strict ? 1 : 0;
        }
        r.pass = plus_wins == 20;
        r.detail = "G = Y + Y*M strictly lower on " + std::to_string(plus_wins) + " of 20 instances";
    }));

    return out;
}

}  // namespace ngmn::oracle
