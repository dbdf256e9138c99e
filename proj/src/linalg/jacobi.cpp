#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clusterlab/error.hpp"
#include "clusterlab/linalg.hpp"
#include "symmetric.hpp"

namespace clab::linalg {

namespace detail {

Matrix checked_symmetric(const Matrix& a, const char* context) {
    if (a.rows() != a.cols())
        fail(ErrorKind::InvalidInput, std::string(context) + ": matrix is not square");
    if (!a.all_finite())
        fail(ErrorKind::InvalidInput, std::string(context) + ": matrix has non-finite entries");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (double v : a.values()) scale = std::max(scale, std::abs(v));
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
                fail(ErrorKind::InvalidInput, std::string(context) + ": matrix is not symmetric at (" +
                                                  std::to_string(i) + ", " + std::to_string(j) + ")");
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

}  // namespace detail

SymEigResult jacobi_eig(const Matrix& input) {
    Matrix a = detail::checked_symmetric(input, "jacobi_eig");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double tol = 1e-12 * a.frobenius_norm();
    constexpr int max_sweeps = 100;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (off_norm() <= tol) {
            converged = true;
            break;
        }
        if (sweep == max_sweeps) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) fail(ErrorKind::NumericalFailure, "jacobi_eig: no convergence after 100 sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymEigResult out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        out.eigenvalues[i] = a(order[i], order[i]);
        for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, i) = v(k, order[i]);
    }
    return out;
}

SymEigResult sym_eig(const Matrix& a) {
    if (a.rows() <= jacobi_max_size) return jacobi_eig(a);
    return tridiagonal_ql_eig(a);
}

}  // namespace clab::linalg
