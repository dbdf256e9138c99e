#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clab {

/// Dense row-major matrix of doubles. Rows are samples when the matrix
/// carries data; the same type also holds Gram, covariance and distance
/// matrices.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }
    const std::vector<double>& values() const noexcept { return values_; }

    Matrix transposed() const;
    /// Rows selected in the given order.
    Matrix select_rows(std::span<const std::size_t> indices) const;

    bool all_finite() const noexcept;
    double frobenius_norm() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Samples-by-features data. Must be non-empty and finite; use
/// validate_data() at ingestion boundaries.
using DataMatrix = Matrix;

/// Throws InvalidInput if the matrix is empty or holds NaN/Inf.
void validate_data(const DataMatrix& x, const char* context);

Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·a, exploiting symmetry.
Matrix gram_transpose(const Matrix& a);
/// a·aᵀ, exploiting symmetry.
Matrix gram(const Matrix& a);

}  // namespace clab
