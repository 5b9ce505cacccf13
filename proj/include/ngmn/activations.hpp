#pragma once

#include "ngmn/common.hpp"

#include <string>

namespace ngmn {

enum class ActivationId : std::uint8_t { Sigmoid = 0, LeakyRelu = 1, Tanh = 2, Identity = 3 };

/// An invertible elementwise activation. `clip_eps` bounds how close to the
/// edge of the range `invert` is allowed to go (Sigmoid and Tanh only).
struct Activation {
    ActivationId id = ActivationId::Sigmoid;
    double slope = 0.1;  // LeakyRelu negative-side slope, in (0, 1)
    double clip_eps = 1e-6;

    static Activation sigmoid(double eps = 1e-6) { return {ActivationId::Sigmoid, 0.1, eps}; }
    static Activation leaky_relu(double slope, double eps = 1e-6) {
        return {ActivationId::LeakyRelu, slope, eps};
    }
    static Activation tanh(double eps = 1e-6) { return {ActivationId::Tanh, 0.1, eps}; }
    static Activation identity() { return {ActivationId::Identity, 0.1, 1e-6}; }

    /// Throws InvalidConfig when slope or eps is out of range.
    void validate() const;

    double forward(double z) const;
    double inverse(double h) const;

    bool operator==(const Activation&) const = default;
};

std::string to_string(ActivationId id);
ActivationId activation_from_string(const std::string& name);

/// sigma(Z) elementwise.
Matrix apply(const Activation& act, const Matrix& Z);

/// sigma^{-1}(H) elementwise, after clipping H into the open range of sigma.
Matrix invert(const Activation& act, const Matrix& H);

/// Column-wise softmax with per-column max subtraction.
Matrix softmax_columns(const Matrix& Z);

}  // namespace ngmn
