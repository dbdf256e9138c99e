#pragma once

#include <cstddef>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clab::linalg {

/// Eigenpairs of a symmetric matrix. eigenvalues ascending; column i of
/// eigenvectors pairs with eigenvalues[i] and the columns are orthonormal.
struct SymEigResult {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

/// Full spectrum. Small matrices go through cyclic Jacobi, larger ones through
/// Householder tridiagonalization and implicit QL.
/// Throws InvalidInput for non-square or asymmetric input and
/// NumericalFailure when the iteration cap is hit.
SymEigResult sym_eig(const Matrix& a);

/// Cyclic Jacobi rotations: at most 100 sweeps, stops once the off-diagonal
/// Frobenius norm drops below 1e-12 * ||A||_F.
SymEigResult jacobi_eig(const Matrix& a);

/// Householder tridiagonalization followed by implicit-shift QL.
SymEigResult tridiagonal_ql_eig(const Matrix& a);

enum class Spectrum { largest, smallest };

/// `count` eigenpairs from one end of the spectrum, still reported ascending.
/// Eigenvalues come from Sturm bisection on the tridiagonal form and vectors
/// from inverse iteration, so the cost beyond the O(n^3) reduction is
/// O(n^2 * count). The pair for a given rank does not depend on `count`.
SymEigResult sym_eig_partial(const Matrix& a, std::size_t count, Spectrum which);

/// Size at or below which sym_eig uses Jacobi.
inline constexpr std::size_t jacobi_max_size = 64;

/// Entry (i, j) = ||x_i - y_j||^2 through the ||x||^2 + ||y||^2 - 2 x.y
/// expansion, clamped at 0. When x and y are the same object the diagonal is
/// exactly 0 and the result exactly symmetric.
Matrix pairwise_sq_dists(const Matrix& x, const Matrix& y);
Matrix pairwise_sq_dists(const Matrix& x);

/// Symmetric tridiagonal form A = Q T Q^T with Q = H_0 H_1 ... H_{n-3}.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  ///< off[i] couples i and i + 1
    struct Reflector {
        double tau = 0.0;          ///< H = I - tau v v^T; tau == 0 means identity
        std::vector<double> v;     ///< acts on coordinates k+1 .. n-1
    };
    std::vector<Reflector> reflectors;

    /// x <- Q x
    void apply_q(std::span<double> x) const;
};

Tridiagonal tridiagonalize(const Matrix& a);

}  // namespace clab::linalg
