#include "ngmn/common.hpp"

namespace ngmn {

std::vector<int> argmax_columns(const Matrix& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.cols()));
    for (Index j = 0; j < scores.cols(); ++j) {
        Index best = 0;
        for (Index i = 1; i < scores.rows(); ++i)
            if (scores(i, j) > scores(best, j)) best = i;
        out[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return out;
}

Matrix one_hot(const std::vector<int>& labels, int classes) {
    Matrix Y = Matrix::Zero(classes, static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= classes)
            throw InvalidInput("one_hot: label " + std::to_string(labels[i]) +
                               " outside [0, " + std::to_string(classes) + ")");
        Y(labels[i], static_cast<Index>(i)) = 1.0;
    }
    return Y;
}

std::string shape_string(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace ngmn
