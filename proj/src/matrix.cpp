#include "clusterlab/matrix.hpp"

#include <cmath>
#include <string>

#include "clusterlab/error.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::FormatError: return "FormatError";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    require(values_.size() == rows_ * cols_,
            "matrix value count " + std::to_string(values_.size()) + " does not match " +
                std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        require(indices[i] < rows_, "row index out of range");
        const auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

bool Matrix::all_finite() const noexcept {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

double Matrix::frobenius_norm() const noexcept {
    return std::sqrt(simd::active().dot(values_.data(), values_.data(), values_.size()));
}

void validate_data(const DataMatrix& x, const char* context) {
    if (x.rows() == 0 || x.cols() == 0)
        fail(ErrorKind::InvalidInput, std::string(context) + ": data matrix is empty");
    if (!x.all_finite())
        fail(ErrorKind::InvalidInput, std::string(context) + ": data matrix has non-finite entries");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    const auto& k = simd::active();
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out = c.row(i).data();
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double aip = a(i, p);
            if (aip != 0.0) k.axpy(aip, b.row(p).data(), out, b.cols());
        }
    }
    return c;
}

Matrix gram_transpose(const Matrix& a) {
    const std::size_t d = a.cols();
    const auto& k = simd::active();
    Matrix c(d, d);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* x = a.row(r).data();
        for (std::size_t i = 0; i < d; ++i)
            if (x[i] != 0.0) k.axpy(x[i], x + i, c.row(i).data() + i, d - i);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j) c(i, j) = c(j, i);
    return c;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.rows();
    const auto& k = simd::active();
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = k.dot(a.row(i).data(), a.row(j).data(), a.cols());
            c(i, j) = v;
            c(j, i) = v;
        }
    return c;
}

}  // namespace clab
