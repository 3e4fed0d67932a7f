#include "pcskm/matrix.hpp"

#include <cmath>
#include <string>

#include "pcskm/error.hpp"

namespace pcskm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) {
        throw DataError("matrix: " + std::to_string(data_.size()) + " values for a " +
                        std::to_string(rows) + "x" + std::to_string(cols) + " shape");
    }
}

DataMatrix::DataMatrix(Matrix values) : m_(std::move(values)) {
    if (m_.rows() < 1 || m_.cols() < 1) throw DataError("data matrix needs n >= 1 and p >= 1");
    for (std::size_t i = 0; i < m_.rows(); ++i) {
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            if (!std::isfinite(m_(i, j))) {
                throw DataError("non-finite value at row " + std::to_string(i) + ", column " +
                                std::to_string(j));
            }
        }
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DataError("data matrix needs n >= 1 and p >= 1");
    const std::size_t p = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != p) {
            throw DataError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " values, expected " + std::to_string(p));
        }
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return DataMatrix(Matrix(rows.size(), p, std::move(values)));
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w) noexcept {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        d += w[j] * diff * diff;
    }
    return d;
}

}  // namespace pcskm
