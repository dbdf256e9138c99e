#include <algorithm>
#include <vector>

#include "clusterlab/error.hpp"
#include "clusterlab/linalg.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab::linalg {

namespace {

std::vector<double> row_sq_norms(const Matrix& x, const simd::KernelTable& k) {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = k.dot(x.row(i).data(), x.row(i).data(), x.cols());
    return out;
}

}  // namespace

Matrix pairwise_sq_dists(const Matrix& x, const Matrix& y) {
    if (&x == &y) return pairwise_sq_dists(x);
    require(x.cols() == y.cols(), "pairwise_sq_dists: feature dimensions differ");
    const auto& k = simd::active();
    const auto nx = row_sq_norms(x, k);
    const auto ny = row_sq_norms(y, k);
    Matrix d(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const double v = nx[i] + ny[j] - 2.0 * k.dot(x.row(i).data(), y.row(j).data(), x.cols());
            d(i, j) = std::max(v, 0.0);
        }
    return d;
}

Matrix pairwise_sq_dists(const Matrix& x) {
    const auto& k = simd::active();
    const auto nx = row_sq_norms(x, k);
    Matrix d(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            const double v = nx[i] + nx[j] - 2.0 * k.dot(x.row(i).data(), x.row(j).data(), x.cols());
            d(i, j) = std::max(v, 0.0);
            d(j, i) = d(i, j);
        }
    return d;
}

}  // namespace clab::linalg
