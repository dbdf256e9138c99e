#include <algorithm>
#include <cmath>
#include <string>

#include "clusterlab/dimred.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/linalg.hpp"

namespace clab::dimred {

namespace {

/// Fills zero columns of `v` with unit vectors orthogonal to the others.
void complete_basis(Matrix& v, const std::vector<bool>& missing) {
    const std::size_t d = v.rows();
    std::size_t probe = 0;
    for (std::size_t c = 0; c < v.cols(); ++c) {
        if (!missing[c]) continue;
        for (; probe < d; ++probe) {
            std::vector<double> e(d, 0.0);
            e[probe] = 1.0;
            for (std::size_t o = 0; o < v.cols(); ++o) {
                if (o == c || (missing[o] && o > c)) continue;
                double dot = 0.0;
                for (std::size_t r = 0; r < d; ++r) dot += v(r, o) * e[r];
                for (std::size_t r = 0; r < d; ++r) e[r] -= dot * v(r, o);
            }
            double norm = 0.0;
            for (double x : e) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t r = 0; r < d; ++r) v(r, c) = e[r] / norm;
                ++probe;
                break;
            }
        }
    }
}

}  // namespace

Embedding pca(const DataMatrix& x, std::size_t target_dim) {
    validate_data(x, "pca");
    const std::size_t n = x.rows(), d = x.cols();
    require(n >= 2, "pca: needs at least 2 rows");
    require(target_dim >= 1 && target_dim <= std::min(n - 1, d),
            "pca: target_dim=" + std::to_string(target_dim) + " outside [1, " + std::to_string(std::min(n - 1, d)) +
                "]");

    Matrix xc = x;
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += x(i, j);
        m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) xc(i, j) -= m;
    }
    double total = 0.0;
    for (double v : xc.values()) total += v * v;
    const double denom = static_cast<double>(n - 1);
    total /= denom;

    Matrix v(d, target_dim);
    std::vector<double> lambda(target_dim);
    std::vector<bool> missing(target_dim, false);
    if (d <= n) {
        Matrix cov = gram_transpose(xc);
        for (std::size_t i = 0; i < cov.size(); ++i) cov.data()[i] /= denom;
        auto eig = linalg::sym_eig_partial(cov, target_dim, linalg::Spectrum::largest);
        for (std::size_t c = 0; c < target_dim; ++c) {
            const std::size_t src = target_dim - 1 - c;  // ascending -> descending
            lambda[c] = eig.eigenvalues[src];
            for (std::size_t r = 0; r < d; ++r) v(r, c) = eig.eigenvectors(r, src);
        }
    } else {
        // n < d: eigenvectors of X X^T map to components through X^T.
        const Matrix g = gram(xc);
        auto eig = linalg::sym_eig_partial(g, target_dim, linalg::Spectrum::largest);
        const double scale_floor = 1e-12 * std::max(1.0, eig.eigenvalues.back());
        for (std::size_t c = 0; c < target_dim; ++c) {
            const std::size_t src = target_dim - 1 - c;
            const double mu = eig.eigenvalues[src];
            lambda[c] = std::max(mu, 0.0) / denom;
            if (mu <= scale_floor) {
                missing[c] = true;
                continue;
            }
            const double inv = 1.0 / std::sqrt(mu);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = eig.eigenvectors(i, src) * inv;
                for (std::size_t r = 0; r < d; ++r) v(r, c) += xc(i, r) * u;
            }
        }
        complete_basis(v, missing);
    }

    for (std::size_t c = 0; c < target_dim; ++c) {
        std::size_t arg = 0;
        for (std::size_t r = 1; r < d; ++r)
            if (std::abs(v(r, c)) > std::abs(v(arg, c))) arg = r;
        if (v(arg, c) < 0.0)
            for (std::size_t r = 0; r < d; ++r) v(r, c) = -v(r, c);
    }

    Embedding e;
    e.method = "pca";
    e.coords = matmul(xc, v);
    e.components = std::move(v);
    e.explained_variance.resize(target_dim);
    for (std::size_t c = 0; c < target_dim; ++c)
        e.explained_variance[c] = total > 0.0 ? std::max(lambda[c], 0.0) / total : 0.0;
    return e;
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::pca: return "pca";
        case Method::tsne: return "tsne";
        case Method::umap: return "umap";
        case Method::none: break;
    }
    return "none";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "none" || name == "raw") return Method::none;
    if (name == "pca") return Method::pca;
    if (name == "tsne") return Method::tsne;
    if (name == "umap" || name == "umap_lite") return Method::umap;
    return std::nullopt;
}

Embedding reduce(const DataMatrix& x, const ReductionSpec& spec) {
    switch (spec.method) {
        case Method::pca: return pca(x, spec.target_dim);
        case Method::tsne: return tsne(x, spec.target_dim, spec.tsne, spec.seed);
        case Method::umap: return umap_lite(x, spec.target_dim, spec.umap, spec.seed);
        case Method::none: break;
    }
    Embedding e;
    e.method = "none";
    e.coords = x;
    return e;
}

}  // namespace clab::dimred
