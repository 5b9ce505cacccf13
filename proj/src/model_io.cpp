#include "ngmn/manifold_net.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

namespace ngmn {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'G', 'M', 'N'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <class T>
    void uint(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            out_.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }

    void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

    void matrix(const Matrix& m) {
        uint(static_cast<std::uint32_t>(m.rows()));
        uint(static_cast<std::uint32_t>(m.cols()));
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void bytes(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError(FormatError::Kind::Truncated,
                              "model file truncated at byte offset " + std::to_string(offset_ + static_cast<std::size_t>(in_.gcount())));
        offset_ += n;
    }

    template <class T>
    T uint() {
        std::array<unsigned char, sizeof(T)> buf{};
        bytes(reinterpret_cast<char*>(buf.data()), buf.size());
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return static_cast<T>(v);
    }

    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

    Matrix matrix() {
        const auto rows = uint<std::uint32_t>();
        const auto cols = uint<std::uint32_t>();
        if (static_cast<std::uint64_t>(rows) * cols > (std::uint64_t{1} << 32))
            throw FormatError(FormatError::Kind::Malformed,
                              "implausible matrix size at byte offset " + std::to_string(offset_));
        Matrix m(rows, cols);
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
        return m;
    }

    Vector vector() {
        const std::size_t at = offset_;
        Matrix m = matrix();
        if (m.cols() != 1 && m.size() != 0)
            throw FormatError(FormatError::Kind::Malformed,
                              "expected a column vector at byte offset " + std::to_string(at));
        return Vector(Eigen::Map<const Vector>(m.data(), m.rows()));
    }

    template <class E>
    E enumeration(std::uint8_t max_value, const char* what) {
        const std::size_t at = offset_;
        const auto v = uint<std::uint8_t>();
        if (v > max_value)
            throw FormatError(FormatError::Kind::Malformed, std::string("bad ") + what +
                                                                " at byte offset " + std::to_string(at));
        return static_cast<E>(v);
    }

    std::size_t offset() const { return offset_; }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

Matrix as_column(const Vector& v) { return Matrix(v); }

}  // namespace

void save_model(const NetworkModel& model, std::ostream& sink) {
    Writer w(sink);
    sink.write(kMagic.data(), kMagic.size());
    w.uint(kModelFormatVersion);

    const ModelConfig& cfg = model.config;
    const RidgeConfig& rc = cfg.ridge;
    w.uint(static_cast<std::uint32_t>(rc.widths.size()));
    for (Index width : rc.widths) w.uint(static_cast<std::uint32_t>(width));
    w.uint(static_cast<std::uint8_t>(rc.activation.id));
    w.f64(rc.activation.slope);
    w.f64(rc.activation.clip_eps);
    w.f64(rc.lambda);
    w.uint(static_cast<std::uint8_t>(cfg.head.gamma_mode));
    w.f64(cfg.head.gamma);
    w.uint(cfg.seed);
    w.uint(static_cast<std::uint8_t>(rc.target_space));
    w.uint(static_cast<std::uint8_t>(cfg.top_target));
    w.uint(static_cast<std::uint8_t>(cfg.head.weighting));
    w.uint(static_cast<std::uint32_t>(rc.max_iter));
    w.f64(rc.tol);
    w.uint(static_cast<std::uint32_t>(cfg.head.inner_iters));

    w.uint(static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        w.matrix(layer.W);
        w.matrix(as_column(layer.b));
    }

    const DecisionState& h = model.head;
    w.matrix(h.W);
    w.matrix(as_column(h.b));
    w.matrix(as_column(h.alpha));
    w.matrix(h.M);
    w.f64(h.lambda);
    w.f64(h.gamma);

    w.uint(static_cast<std::uint32_t>(model.trace.size()));
    for (const auto& row : model.trace) {
        w.uint(static_cast<std::uint32_t>(row.iter));
        w.f64(row.loss);
        w.f64(row.train_acc);
    }
    if (!sink) throw FormatError(FormatError::Kind::Io, "failed writing model");
}

NetworkModel load_model(std::istream& source) {
    Reader r(source);
    std::array<char, 4> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != kMagic) throw FormatError(FormatError::Kind::BadMagic, "not an NGMN model file (bad magic)");
    const auto version = r.uint<std::uint16_t>();
    if (version != kModelFormatVersion)
        throw FormatError(FormatError::Kind::VersionMismatch,
                          "model format version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(kModelFormatVersion) + ")");

    NetworkModel model;
    ModelConfig& cfg = model.config;
    RidgeConfig& rc = cfg.ridge;
    const auto n_widths = r.uint<std::uint32_t>();
    if (n_widths > 4096)
        throw FormatError(FormatError::Kind::Malformed, "implausible layer count in model config");
    for (std::uint32_t i = 0; i < n_widths; ++i) rc.widths.push_back(r.uint<std::uint32_t>());
    rc.activation.id = r.enumeration<ActivationId>(3, "activation id");
    rc.activation.slope = r.f64();
    rc.activation.clip_eps = r.f64();
    rc.lambda = r.f64();
    cfg.head.gamma_mode = r.enumeration<GammaMode>(1, "gamma mode");
    cfg.head.gamma = r.f64();
    cfg.seed = r.uint<std::uint64_t>();
    rc.target_space = r.enumeration<TargetSpace>(1, "target space");
    cfg.top_target = r.enumeration<TopTarget>(1, "top target");
    cfg.head.weighting = r.enumeration<Weighting>(1, "weighting");
    rc.max_iter = static_cast<int>(r.uint<std::uint32_t>());
    rc.tol = r.f64();
    cfg.head.inner_iters = static_cast<int>(r.uint<std::uint32_t>());

    const auto n_layers = r.uint<std::uint32_t>();
    if (n_layers != n_widths)
        throw FormatError(FormatError::Kind::Malformed, "layer count does not match configured widths");
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerParams p;
        p.W = r.matrix();
        p.b = r.vector();
        p.activation = rc.activation;
        if (p.b.size() != p.W.cols() || p.W.cols() != static_cast<Index>(rc.widths[i]) ||
            (i > 0 && p.W.rows() != model.layers.back().out_dim()))
            throw FormatError(FormatError::Kind::Malformed, "inconsistent dimensions in ridge layer " +
                                                                std::to_string(i));
        model.layers.push_back(std::move(p));
    }

    DecisionState& h = model.head;
    h.W = r.matrix();
    h.b = r.vector();
    h.alpha = r.vector();
    h.M = r.matrix();
    h.lambda = r.f64();
    h.gamma = r.f64();
    h.gamma_mode = cfg.head.gamma_mode;
    if (h.b.size() != h.W.cols() || h.M.rows() != h.W.cols() || h.M.cols() != h.alpha.size() ||
        (!model.layers.empty() && h.W.rows() != model.layers.back().out_dim()))
        throw FormatError(FormatError::Kind::Malformed, "inconsistent dimensions in decision head");

    const auto n_trace = r.uint<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_trace; ++i) {
        TraceRow row;
        row.iter = static_cast<int>(r.uint<std::uint32_t>());
        row.loss = r.f64();
        row.train_acc = r.f64();
        model.trace.push_back(row);
    }
    return model;
}

void save_model_file(const NetworkModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::Io, "cannot open '" + path + "' for writing");
    save_model(model, out);
}

NetworkModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::Io, "cannot open '" + path + "'");
    try {
        return load_model(in);
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), path + ": " + e.what());
    }
}

}  // namespace ngmn
