#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clab::dimred {

struct Embedding {
    Matrix coords;  ///< n x target_dim
    std::string method;
    std::vector<double> explained_variance;  ///< PCA: fraction of total variance per component
    Matrix components;                       ///< PCA: d x target_dim, orthonormal columns
    std::vector<std::pair<std::size_t, double>> kl_history;  ///< t-SNE: (iteration, KL(P||Q))
    bool nonstandard = false;  ///< t-SNE with more than 3 output dimensions
};

/// Projection of the centred data on the leading covariance eigenvectors,
/// descending by variance. Each component's largest-magnitude entry is
/// positive. Needs 1 <= target_dim <= min(n - 1, d).
Embedding pca(const DataMatrix& x, std::size_t target_dim);

struct TsneParams {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
};

struct TsneAffinities {
    Matrix joint;                     ///< symmetric, zero diagonal, sums to 1
    std::vector<double> betas;        ///< per-row precision 1 / (2 sigma^2)
    std::vector<double> perplexity;   ///< achieved per-row perplexity
};

/// Conditional Gaussian affinities with per-row bandwidths matched to the
/// perplexity by bisection, then symmetrised. perplexity < (n - 1) / 3.
TsneAffinities tsne_affinities(const DataMatrix& x, double perplexity);

/// Exact t-SNE (all pairs). Initialised from the leading principal
/// components scaled to standard deviation 1e-4.
Embedding tsne(const DataMatrix& x, std::size_t target_dim, const TsneParams& params, std::uint64_t seed);

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    double spread = 1.0;
    std::size_t epochs = 500;
    std::size_t negative_samples = 5;
    double learning_rate = 1.0;
};

struct FuzzyEdge {
    std::size_t from;
    std::size_t to;
    double weight;
};

struct FuzzyGraph {
    std::vector<FuzzyEdge> edges;  ///< both directions of every symmetric edge, sorted
    std::vector<double> rho;       ///< distance to the nearest neighbour
    std::vector<double> sigma;
};

/// Membership strengths exp(-max(0, d - rho) / sigma) over the exact kNN
/// graph, sigma chosen so each row sums to log2(n_neighbors); combined as
/// a + b - ab.
FuzzyGraph fuzzy_graph(const DataMatrix& x, std::size_t n_neighbors);

/// Least-squares fit of 1 / (1 + a r^(2b)) to the target curve: 1 up to
/// min_dist, exp(-(r - min_dist) / spread) beyond, on r = 3i/300, i = 1..300.
std::pair<double, double> fit_curve(double min_dist, double spread);

/// Graph layout by stochastic gradient descent with negative sampling.
Embedding umap_lite(const DataMatrix& x, std::size_t target_dim, const UmapParams& params, std::uint64_t seed);

enum class Method { none, pca, tsne, umap };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct ReductionSpec {
    Method method = Method::none;
    std::size_t target_dim = 50;
    TsneParams tsne;
    UmapParams umap;
    std::uint64_t seed = 0;
};

/// Dispatch on spec.method; Method::none returns the input unchanged.
Embedding reduce(const DataMatrix& x, const ReductionSpec& spec);

}  // namespace clab::dimred
