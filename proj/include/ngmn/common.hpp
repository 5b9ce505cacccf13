#pragma once

// Shared types and the error hierarchy for the ngmn library.
//
// Orientation convention used everywhere: one column per sample, so a data
// matrix is features x samples and a label matrix is classes x samples.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ngmn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

// Raised when the manifold constraint W^T A W = I_c cannot hold (d < c).
class ManifoldInfeasible : public Error {
public:
    using Error::Error;
};

// Deserialization and file-parsing failures.
class FormatError : public Error {
public:
    enum class Kind { BadMagic, VersionMismatch, Truncated, CountMismatch, Malformed, Io };

    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline void require_shape(bool ok, const std::string& what) {
    if (!ok) throw ShapeError(what);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Argmax per column; ties resolve to the lowest row index.
std::vector<int> argmax_columns(const Matrix& scores);

// One-hot (c x n) matrix from class indices.
Matrix one_hot(const std::vector<int>& labels, int classes);

std::string shape_string(const Matrix& m);

}  // namespace ngmn
