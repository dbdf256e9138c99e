#include <cmath>
#include <string>

#include "clusterlab/clusterers.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/linalg.hpp"
#include "clusterlab/neighbors.hpp"

namespace clab::cluster {

Matrix normalized_affinity(const DataMatrix& x, std::size_t n_neighbors) {
    validate_data(x, "spectral");
    const std::size_t n = x.rows();
    require(n_neighbors >= 1 && n_neighbors < n, "spectral: n_neighbors must be in [1, n-1]");
    const auto graph = neighbors::knn_graph(neighbors::NeighborIndex(x), n_neighbors);
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : graph[i].indices) {
            w(i, j) = 1.0;
            w(j, i) = 1.0;
        }
    std::vector<double> scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (double v : w.row(i)) deg += v;
        scale[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) *= scale[i] * scale[j];
    return w;
}

SpectralResult spectral_embedding(const DataMatrix& x, std::size_t k, std::size_t n_neighbors) {
    require(k >= 1 && k <= x.rows(), "spectral: k=" + std::to_string(k) + " must be in [1, n]");
    require(x.rows() <= spectral_max_rows, "spectral: n=" + std::to_string(x.rows()) + " exceeds the dense limit of " +
                                               std::to_string(spectral_max_rows) + "; subsample first");
    const Matrix m = normalized_affinity(x, n_neighbors);
    auto eig = linalg::sym_eig_partial(m, k, linalg::Spectrum::largest);

    SpectralResult r;
    r.eigenvalues = eig.eigenvalues;
    r.embedding = std::move(eig.eigenvectors);
    for (std::size_t i = 0; i < r.embedding.rows(); ++i) {
        auto row = r.embedding.row(i);
        double norm = 0.0;
        for (double v : row) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& v : row) v /= norm;
    }
    return r;
}

SpectralResult spectral(const DataMatrix& x, std::size_t k, std::size_t n_neighbors, std::uint64_t seed) {
    SpectralResult r = spectral_embedding(x, k, n_neighbors);
    r.labeling = spectral_assign(r, k, seed);
    return r;
}

Labeling spectral_assign(const SpectralResult& embedded, std::size_t k, std::uint64_t seed) {
    return kmeans(embedded.embedding, k, 10, seed).labeling;
}

}  // namespace clab::cluster
