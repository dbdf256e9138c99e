#include "clusterlab/simd/kernels.hpp"

namespace clab::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_l2_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sub_rank2_scalar(double a, const double* x1, double b, const double* x2, double* y,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] -= a * x1[i] + b * x2[i];
}

}  // namespace

const KernelTable scalar_table{Isa::scalar, dot_scalar, sq_l2_scalar, axpy_scalar,
                               sub_rank2_scalar};

}  // namespace clab::simd::detail
