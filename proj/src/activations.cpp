#include "ngmn/activations.hpp"

#include "ngmn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ngmn {

void Activation::validate() const {
    if (id == ActivationId::LeakyRelu && !(slope > 0.0 && slope < 1.0))
        throw InvalidConfig("leaky relu slope must lie in (0, 1)");
    if (!(clip_eps > 0.0 && clip_eps < 0.1))
        throw InvalidConfig("activation clip epsilon must lie in (0, 0.1)");
}

double Activation::forward(double z) const {
    switch (id) {
        case ActivationId::Sigmoid:
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            return std::exp(z) / (1.0 + std::exp(z));
        case ActivationId::LeakyRelu:
            return z >= 0.0 ? z : slope * z;
        case ActivationId::Tanh:
            return std::tanh(z);
        case ActivationId::Identity:
            return z;
    }
    return z;
}

double Activation::inverse(double h) const {
    switch (id) {
        case ActivationId::Sigmoid: {
            const double c = std::clamp(h, clip_eps, 1.0 - clip_eps);
            return std::log(c) - std::log1p(-c);
        }
        case ActivationId::LeakyRelu:
            return h >= 0.0 ? h : h / slope;
        case ActivationId::Tanh:
            return std::atanh(std::clamp(h, -1.0 + clip_eps, 1.0 - clip_eps));
        case ActivationId::Identity:
            return h;
    }
    return h;
}

std::string to_string(ActivationId id) {
    switch (id) {
        case ActivationId::Sigmoid: return "sigmoid";
        case ActivationId::LeakyRelu: return "leaky_relu";
        case ActivationId::Tanh: return "tanh";
        case ActivationId::Identity: return "identity";
    }
    return "unknown";
}

ActivationId activation_from_string(const std::string& name) {
    if (name == "sigmoid") return ActivationId::Sigmoid;
    if (name == "leaky_relu" || name == "leakyrelu") return ActivationId::LeakyRelu;
    if (name == "tanh") return ActivationId::Tanh;
    if (name == "identity") return ActivationId::Identity;
    throw InvalidConfig("unknown activation '" + name + "'");
}

Matrix apply(const Activation& act, const Matrix& Z) {
    Matrix H = Z;
    kernels::map_inplace(H, [&act](double z) { return act.forward(z); });
    return H;
}

Matrix invert(const Activation& act, const Matrix& H) {
    Matrix Z = H;
    kernels::map_inplace(Z, [&act](double h) { return act.inverse(h); });
    return Z;
}

Matrix softmax_columns(const Matrix& Z) {
    Matrix out(Z.rows(), Z.cols());
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < Z.cols(); ++j) {
        const double top = Z.col(j).maxCoeff();
        double total = 0.0;
        for (Index i = 0; i < Z.rows(); ++i) {
            out(i, j) = std::exp(Z(i, j) - top);
            total += out(i, j);
        }
        out.col(j) /= total;
    }
    return out;
}

}  // namespace ngmn
