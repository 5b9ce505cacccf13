#include "ngmn/cli.hpp"

#include "ngmn/data.hpp"
#include "ngmn/kernels.hpp"
#include "ngmn/manifold_net.hpp"
#include "ngmn/oracle.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace ngmn {

namespace {

// Flags shared by every command that trains.
struct TrainFlags {
    std::string widths = "10,8";
    double lambda = 0.5;
    std::uint64_t seed = 0;
    std::string activation = "sigmoid";
    double slope = 0.1;
    double eps = 1e-6;
    std::string gamma_mode = "self";
    double gamma = 1.0;
    std::string weighting = "adaptive";
    int max_iter = 30;
    double tol = 1e-4;
    int inner_iters = 3;
    std::string target_space = "inverse";
    std::string top_target = "slack";
};

struct DataFlags {
    std::string path;
    std::string label_col = "0";
};

std::vector<Index> parse_widths(const std::string& text) {
    std::vector<Index> widths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        long long v = 0;
        const auto* first = item.data();
        const auto* last = item.data() + item.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || v < 1)
            throw CLI::ValidationError("--widths", "expected positive integers separated by commas, got '" + text + "'");
        widths.push_back(static_cast<Index>(v));
    }
    if (widths.empty()) throw CLI::ValidationError("--widths", "at least one width is required");
    return widths;
}

LabelColumn parse_label_col(const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    return text;
}

ModelConfig to_config(const TrainFlags& f) {
    ModelConfig cfg;
    cfg.ridge.widths = parse_widths(f.widths);
    cfg.ridge.lambda = f.lambda;
    cfg.ridge.activation.id = activation_from_string(f.activation);
    cfg.ridge.activation.slope = f.slope;
    cfg.ridge.activation.clip_eps = f.eps;
    cfg.ridge.max_iter = f.max_iter;
    cfg.ridge.tol = f.tol;
    cfg.ridge.target_space = f.target_space == "direct" ? TargetSpace::Direct : TargetSpace::InverseActivation;
    cfg.head.gamma_mode = f.gamma_mode == "fixed" ? GammaMode::Fixed : GammaMode::SelfTuned;
    cfg.head.gamma = f.gamma;
    cfg.head.weighting = f.weighting == "uniform" ? Weighting::Uniform : Weighting::Adaptive;
    cfg.head.inner_iters = f.inner_iters;
    cfg.top_target = f.top_target == "labels" ? TopTarget::Labels : TopTarget::SlackTarget;
    cfg.seed = f.seed;
    return cfg;
}

void add_data_flags(CLI::App* app, DataFlags& d) {
    app->add_option("--data", d.path, "CSV file, one sample per row")->required();
    app->add_option("--label-col", d.label_col, "label column: zero-based index or header name")
        ->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
    app->add_option("--widths", f.widths, "hidden layer widths, comma separated")->capture_default_str();
    app->add_option("--lambda", f.lambda, "ridge penalty")->capture_default_str();
    app->add_option("--seed", f.seed, "initialization seed")->envname("NGMN_SEED")->capture_default_str();
    app->add_option("--activation", f.activation, "hidden activation")
        ->check(CLI::IsMember({"sigmoid", "leaky_relu", "tanh", "identity"}))
        ->capture_default_str();
    app->add_option("--slope", f.slope, "leaky_relu negative slope")->capture_default_str();
    app->add_option("--eps", f.eps, "clip margin before inverting the activation")->capture_default_str();
    app->add_option("--gamma-mode", f.gamma_mode, "weight regularizer mode")
        ->check(CLI::IsMember({"self", "fixed"}))
        ->capture_default_str();
    app->add_option("--gamma", f.gamma, "weight regularizer when --gamma-mode fixed")->capture_default_str();
    app->add_option("--weighting", f.weighting, "sample weighting in the head")
        ->check(CLI::IsMember({"adaptive", "uniform"}))
        ->capture_default_str();
    app->add_option("--max-iter", f.max_iter, "outer iterations")->capture_default_str();
    app->add_option("--tol", f.tol, "relative loss change that stops training")->capture_default_str();
    app->add_option("--inner-iters", f.inner_iters, "head passes per outer iteration")->capture_default_str();
    app->add_option("--target-space", f.target_space, "ridge regression target")
        ->check(CLI::IsMember({"inverse", "direct"}))
        ->capture_default_str();
    app->add_option("--top-target", f.top_target, "labels seeded into the top ridge layer")
        ->check(CLI::IsMember({"slack", "labels"}))
        ->capture_default_str();
}

void metric(std::ostream& out, const std::string& name, double value) {
    out << name << ',' << std::setprecision(10) << value << '\n';
}

void write_trace(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::Io, "cannot open '" + path + "' for writing");
    out << "iter,loss,train_acc\n" << std::setprecision(17);
    for (const auto& row : trace) out << row.iter << ',' << row.loss << ',' << row.train_acc << '\n';
    if (!out) throw FormatError(FormatError::Kind::Io, "failed writing '" + path + "'");
}

// Train/test split; with `scale`, min-max bounds come from the training part only.
std::pair<Dataset, Dataset> held_out(const Dataset& ds, double test_fraction, std::uint64_t seed, bool scale) {
    auto parts = split(ds, 1.0 - test_fraction, seed);
    if (scale) {
        const RowScaling s = RowScaling::fit(parts.first.X);
        parts.first.X = s.apply(parts.first.X);
        parts.second.X = s.apply(parts.second.X);
    }
    return parts;
}

struct Evaluation {
    double train_acc = 0.0;
    double test_acc = 0.0;
    double test_f1 = 0.0;
};

Evaluation evaluate(const std::vector<int>& train_pred, const Dataset& train,
                    const std::vector<int>& test_pred, const Dataset& test) {
    return {accuracy(train_pred, train.labels), accuracy(test_pred, test.labels),
            macro_f1(test_pred, test.labels, test.classes)};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed-form manifold network trainer"};
    app.require_subcommand(1);
    // Lets global options such as --config appear after the subcommand too.
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file; options go under a [train], [eval], ... section");
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads for the kernels (0 = runtime default)");

    // train
    TrainFlags train_flags;
    DataFlags train_data;
    std::string model_out;
    std::string trace_out;
    auto* train_cmd = app.add_subcommand("train", "fit a model and write it with its loss trace");
    add_data_flags(train_cmd, train_data);
    add_train_flags(train_cmd, train_flags);
    train_cmd->add_option("--out", model_out, "model file")->required();
    train_cmd->add_option("--trace", trace_out, "trace CSV (default: <out>.trace.csv)");

    // eval / predict
    DataFlags eval_data;
    std::string eval_model;
    auto* eval_cmd = app.add_subcommand("eval", "accuracy and macro-F1 of a model on labelled data");
    add_data_flags(eval_cmd, eval_data);
    eval_cmd->add_option("--model", eval_model, "model file")->required();

    DataFlags predict_data;
    std::string predict_model;
    auto* predict_cmd = app.add_subcommand("predict", "print one predicted class index per sample");
    add_data_flags(predict_cmd, predict_data);
    predict_cmd->add_option("--model", predict_model, "model file")->required();

    // verify
    std::uint64_t verify_seed = 0;
    auto* verify_cmd = app.add_subcommand("verify", "certify the closed forms against numerical oracles");
    verify_cmd->add_option("--seed", verify_seed, "instance seed")->envname("NGMN_SEED")->capture_default_str();

    // sweep / ablate share a split
    TrainFlags sweep_flags;
    DataFlags sweep_data;
    double sweep_test = 0.2;
    std::uint64_t sweep_split = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "train across lambda = 2^-3 .. 2^3 and tabulate metrics");
    add_data_flags(sweep_cmd, sweep_data);
    add_train_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--test-fraction", sweep_test, "held-out fraction")->capture_default_str();
    bool sweep_scale = false;
    sweep_cmd->add_flag("--scale", sweep_scale, "min-max scale features to [0, 1] using the training part");
    sweep_cmd->add_option("--split-seed", sweep_split, "split seed")->capture_default_str();

    TrainFlags ablate_flags;
    DataFlags ablate_data;
    double ablate_test = 0.2;
    std::uint64_t ablate_split = 0;
    auto* ablate_cmd = app.add_subcommand("ablate", "ridge net alone, + uniform-weight head, + adaptive weights");
    add_data_flags(ablate_cmd, ablate_data);
    add_train_flags(ablate_cmd, ablate_flags);
    ablate_cmd->add_option("--test-fraction", ablate_test, "held-out fraction")->capture_default_str();
    bool ablate_scale = false;
    ablate_cmd->add_flag("--scale", ablate_scale, "min-max scale features to [0, 1] using the training part");
    ablate_cmd->add_option("--split-seed", ablate_split, "split seed")->capture_default_str();

    // make-data
    std::string kind;
    std::string data_out;
    Index n_samples = 0;
    std::uint64_t data_seed = 0;
    auto* make_cmd = app.add_subcommand("make-data", "write a synthetic benchmark as CSV");
    make_cmd->add_option("kind", kind, "blobs or waveform")->required()->check(CLI::IsMember({"blobs", "waveform"}));
    make_cmd->add_option("--out", data_out, "CSV file")->required();
    make_cmd->add_option("--n", n_samples, "sample count for waveform (blobs is fixed at 600)");
    make_cmd->add_option("--seed", data_seed, "generator seed")->envname("NGMN_SEED")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (threads > 0) kernels::set_threads(threads);

        if (*train_cmd) {
            const ModelConfig cfg = to_config(train_flags);
            const Dataset ds = load_csv(train_data.path, parse_label_col(train_data.label_col));
            const NetworkModel model = train(ds.X, ds.one_hot(), cfg);
            save_model_file(model, model_out);
            write_trace(model.trace, trace_out.empty() ? model_out + ".trace.csv" : trace_out);
            metric(out, "train_accuracy", accuracy(predict(model, ds.X), ds.labels));
            metric(out, "iterations", static_cast<double>(model.trace.size()));
            metric(out, "final_loss", model.trace.back().loss);
            return 0;
        }
        if (*eval_cmd) {
            const NetworkModel model = load_model_file(eval_model);
            const Dataset ds = load_csv(eval_data.path, parse_label_col(eval_data.label_col));
            const auto pred = predict(model, ds.X);
            metric(out, "accuracy", accuracy(pred, ds.labels));
            metric(out, "macro_f1", macro_f1(pred, ds.labels, std::max(ds.classes, static_cast<int>(model.classes()))));
            return 0;
        }
        if (*predict_cmd) {
            const NetworkModel model = load_model_file(predict_model);
            const Dataset ds = load_csv(predict_data.path, parse_label_col(predict_data.label_col));
            for (int p : predict(model, ds.X)) out << p << '\n';
            return 0;
        }
        if (*verify_cmd) {
            bool ok = true;
            out << "check,status,seconds,detail\n";
            for (const auto& r : oracle::run_verification_suite(verify_seed)) {
                ok = ok && r.pass;
                out << r.name << ',' << (r.pass ? "pass" : "FAIL") << ',' << std::fixed << std::setprecision(3)
                    << r.seconds << std::defaultfloat << ',' << r.detail << '\n';
            }
            return ok ? 0 : 1;
        }
        if (*sweep_cmd) {
            const Dataset ds = load_csv(sweep_data.path, parse_label_col(sweep_data.label_col));
            const auto [tr, te] = held_out(ds, sweep_test, sweep_split, sweep_scale);
            out << "lambda,train_acc,test_acc,test_macro_f1,iterations\n";
            for (int e = -3; e <= 3; ++e) {
                TrainFlags f = sweep_flags;
                f.lambda = std::ldexp(1.0, e);
                const NetworkModel model = train(tr.X, tr.one_hot(), to_config(f));
                const Evaluation ev = evaluate(predict(model, tr.X), tr, predict(model, te.X), te);
                out << std::setprecision(10) << f.lambda << ',' << ev.train_acc << ',' << ev.test_acc << ','
                    << ev.test_f1 << ',' << model.trace.size() << '\n';
            }
            return 0;
        }
        if (*ablate_cmd) {
            const Dataset ds = load_csv(ablate_data.path, parse_label_col(ablate_data.label_col));
            const auto [tr, te] = held_out(ds, ablate_test, ablate_split, ablate_scale);
            out << "config,train_acc,test_acc,test_macro_f1\n";
            const auto row = [&](const char* name, const Evaluation& ev) {
                out << name << ',' << std::setprecision(10) << ev.train_acc << ',' << ev.test_acc << ','
                    << ev.test_f1 << '\n';
            };

            ModelConfig cfg = to_config(ablate_flags);
            RidgeConfig rc = cfg.ridge;
            rc.widths.push_back(tr.classes);
            const auto ridge = train_ridge_network(tr.X, tr.one_hot(), rc, cfg.seed);
            row("ridge", evaluate(predict_ridge(ridge.layers, tr.X), tr, predict_ridge(ridge.layers, te.X), te));

            cfg.head.weighting = Weighting::Uniform;
            const NetworkModel uniform = train(tr.X, tr.one_hot(), cfg);
            row("ridge_svm", evaluate(predict(uniform, tr.X), tr, predict(uniform, te.X), te));

            cfg.head.weighting = Weighting::Adaptive;
            const NetworkModel adaptive = train(tr.X, tr.one_hot(), cfg);
            row("ridge_svm_aw", evaluate(predict(adaptive, tr.X), tr, predict(adaptive, te.X), te));
            return 0;
        }
        if (*make_cmd) {
            Dataset ds;
            if (kind == "blobs") {
                ds = blobs_benchmark(data_seed);
            } else {
                ds = make_waveform(n_samples > 0 ? n_samples : 2746, data_seed);
            }
            std::ofstream file(data_out, std::ios::trunc);
            if (!file) throw FormatError(FormatError::Kind::Io, "cannot open '" + data_out + "' for writing");
            write_csv(ds, file);
            metric(out, "samples", static_cast<double>(ds.samples()));
            metric(out, "features", static_cast<double>(ds.features()));
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace ngmn
