#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcskm {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// n x p observation matrix. Construction enforces n >= 1, p >= 1 and finite entries.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values);
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : DataMatrix(Matrix(rows, cols, std::move(values))) {}

    /// Builds from nested rows; all rows must share one arity.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t n() const noexcept { return m_.rows(); }
    [[nodiscard]] std::size_t p() const noexcept { return m_.cols(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return m_.row(i); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    Matrix m_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Sum_j w_j (a_j - b_j)^2, accumulated in ascending j.
double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w) noexcept;

}  // namespace pcskm
