#include "helpers.hpp"
#include "ngmn/cli.hpp"
#include "ngmn/data.hpp"
#include "ngmn/manifold_net.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace ngmn;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string blobs_csv() {
    const std::string path = testing::tmp_path("cli_blobs.csv");
    std::ofstream out(path);
    write_csv(make_blobs(90, 4, 3, 1.0, 6.0, 3), out);
    return path;
}

int lines(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("train writes a model and a trace") {
    const std::string data = blobs_csv();
    const std::string model = testing::tmp_path("cli_model.ngmn");
    const Run r = cli({"train", "--data", data, "--label-col", "0", "--widths", "10,8", "--lambda", "0.5",
                       "--seed", "7", "--max-iter", "4", "--out", model});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("train_accuracy,") != std::string::npos);
    const std::string trace = slurp(model + ".trace.csv");
    CHECK(trace.rfind("iter,loss,train_acc\n", 0) == 0);
    const NetworkModel m = load_model_file(model);
    CHECK(lines(trace) == static_cast<int>(m.trace.size()) + 1);
    CHECK(m.config.seed == 7);
    CHECK(m.config.ridge.widths == std::vector<Index>{10, 8});
}

TEST_CASE("train is byte-for-byte deterministic") {
    const std::string data = blobs_csv();
    const std::string a = testing::tmp_path("cli_det_a.ngmn");
    const std::string b = testing::tmp_path("cli_det_b.ngmn");
    REQUIRE(cli({"train", "--data", data, "--seed", "3", "--max-iter", "3", "--out", a}).code == 0);
    REQUIRE(cli({"train", "--data", data, "--seed", "3", "--max-iter", "3", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a + ".trace.csv") == slurp(b + ".trace.csv"));
}

TEST_CASE("NGMN_SEED supplies the seed") {
    const std::string data = blobs_csv();
    const std::string env = testing::tmp_path("cli_env.ngmn");
    const std::string flag = testing::tmp_path("cli_flag.ngmn");
    ::setenv("NGMN_SEED", "12", 1);
    const Run r = cli({"train", "--data", data, "--max-iter", "2", "--out", env});
    ::unsetenv("NGMN_SEED");
    REQUIRE(r.code == 0);
    REQUIRE(cli({"train", "--data", data, "--max-iter", "2", "--seed", "12", "--out", flag}).code == 0);
    CHECK(slurp(env) == slurp(flag));
    CHECK(load_model_file(env).config.seed == 12);
}

TEST_CASE("a config file supplies options") {
    const std::string data = blobs_csv();
    const std::string conf = testing::tmp_path("cli.ini");
    {
        std::ofstream out(conf);
        out << "[train]\nlambda=0.25\nwidths=\"6,5\"\nmax-iter=2\n";
    }
    const std::string model = testing::tmp_path("cli_conf.ngmn");
    const Run r = cli({"train", "--config", conf, "--data", data, "--out", model});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const NetworkModel m = load_model_file(model);
    CHECK(m.config.ridge.lambda == 0.25);
    CHECK(m.config.ridge.widths == std::vector<Index>{6, 5});
    CHECK(m.trace.size() <= 2);
}

TEST_CASE("eval and predict") {
    const std::string data = blobs_csv();
    const std::string model = testing::tmp_path("cli_eval.ngmn");
    REQUIRE(cli({"train", "--data", data, "--max-iter", "2", "--widths", "6,4", "--out", model}).code == 0);

    const Run e = cli({"eval", "--model", model, "--data", data});
    CHECK(e.code == 0);
    CHECK(e.out.find("accuracy,") != std::string::npos);
    CHECK(e.out.find("macro_f1,") != std::string::npos);

    const Run p = cli({"predict", "--model", model, "--data", data});
    CHECK(p.code == 0);
    CHECK(lines(p.out) == 90);

    const std::string narrow = testing::tmp_path("cli_narrow.csv");
    {
        std::ofstream out(narrow);
        write_csv(make_blobs(9, 3, 3, 1.0, 6.0, 4), out);
    }
    const Run bad = cli({"eval", "--model", model, "--data", narrow});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("features") != std::string::npos);
}

TEST_CASE("verify passes") {
    const Run r = cli({"verify", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("check,status,seconds,detail\n", 0) == 0);
    CHECK(r.out.find(",FAIL,") == std::string::npos);
    CHECK(lines(r.out) >= 10);
}

TEST_CASE("sweep and ablate tabulate") {
    const std::string data = blobs_csv();
    const Run s = cli({"sweep", "--data", data, "--max-iter", "2", "--widths", "6,4", "--scale"});
    INFO(s.err);
    CHECK(s.code == 0);
    CHECK(lines(s.out) == 8);
    CHECK(s.out.find("\n0.125,") != std::string::npos);
    CHECK(s.out.find("\n8,") != std::string::npos);

    const Run a = cli({"ablate", "--data", data, "--max-iter", "2", "--widths", "6,4"});
    CHECK(a.code == 0);
    CHECK(a.out.find("\nridge,") != std::string::npos);
    CHECK(a.out.find("\nridge_svm,") != std::string::npos);
    CHECK(a.out.find("\nridge_svm_aw,") != std::string::npos);
}

TEST_CASE("make-data writes loadable CSV") {
    const std::string path = testing::tmp_path("cli_wave.csv");
    const Run r = cli({"make-data", "waveform", "--n", "50", "--seed", "2", "--out", path});
    CHECK(r.code == 0);
    const Dataset ds = load_csv(path, std::size_t{0});
    CHECK(ds.samples() == 50);
    CHECK(ds.features() == 21);
}

TEST_CASE("usage errors exit with 2") {
    const std::string data = blobs_csv();
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"train", "--out", "x.ngmn"}).code == 2);
    CHECK(cli({"train", "--data", data, "--out", testing::tmp_path("w.ngmn"), "--widths", "4,x"}).code == 2);
    CHECK(cli({"train", "--data", data, "--out", testing::tmp_path("w.ngmn"), "--lambda", "-1"}).code == 2);
    CHECK(cli({"train", "--data", data, "--out", testing::tmp_path("w.ngmn"), "--activation", "relu6"}).code == 2);
    CHECK(cli({"make-data", "spirals", "--out", testing::tmp_path("s.csv")}).code == 2);
}

TEST_CASE("data errors exit with 1 and name the file") {
    const Run missing = cli({"train", "--data", testing::tmp_path("nope.csv"), "--out", testing::tmp_path("n.ngmn")});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("nope.csv") != std::string::npos);

    const std::string ragged = testing::tmp_path("ragged.csv");
    {
        std::ofstream out(ragged);
        out << "0,1,2\n1,3\n";
    }
    const Run r = cli({"train", "--data", ragged, "--out", testing::tmp_path("r.ngmn")});
    CHECK(r.code == 1);
    CHECK(r.err.find("ragged.csv:2") != std::string::npos);

    const Run corrupt = cli({"eval", "--model", ragged, "--data", blobs_csv()});
    CHECK(corrupt.code == 1);
}

TEST_CASE("help exits with 0") {
    const Run r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("train") != std::string::npos);
}
