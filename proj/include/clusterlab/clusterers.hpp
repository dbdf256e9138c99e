#pragma once

#include <cstdint>
#include <vector>

#include "clusterlab/labels.hpp"
#include "clusterlab/matrix.hpp"

namespace clab::cluster {

struct KMeansResult {
    Labeling labeling;
    Matrix centroids;  ///< one row per cluster, the mean of its members
    double inertia = 0.0;
    std::size_t iterations_run = 0;
    /// Inertia after every centroid update of the winning restart, ending
    /// with the final value. Non-increasing.
    std::vector<double> inertia_history;
    std::size_t best_restart = 0;
    std::vector<double> restart_inertias;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    double tolerance = 1e-9;  ///< stop when the relative inertia gain drops below this
};

/// k-means++ seeding followed by Lloyd iterations, best of `restarts` by
/// inertia (ties to the earlier restart). Restart r uses derive_seed(seed, r).
KMeansResult kmeans(const DataMatrix& x, std::size_t k, std::size_t restarts, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// A single restart seeded directly with `seed`.
KMeansResult kmeans_once(const DataMatrix& x, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

struct DbscanParams {
    double eps = 0.5;
    std::size_t min_pts = 10;
};

/// Core points have at least min_pts rows within eps, themselves included.
/// Clusters are the eps-connected components of core points, numbered by
/// their lowest row; a border row joins the cluster of its lowest-index core
/// neighbour. Everything else is kNoise. No randomness.
Labeling dbscan(const DataMatrix& x, const DbscanParams& params);

/// eps at the knee of the (min_pts - 1)-distance profile.
double auto_eps(const DataMatrix& x, std::size_t min_pts);

/// D^-1/2 W D^-1/2 for the binary kNN graph symmetrised by union.
/// Rows of isolated vertices are zero.
Matrix normalized_affinity(const DataMatrix& x, std::size_t n_neighbors);

struct SpectralResult {
    Labeling labeling;
    Matrix embedding;                  ///< row-normalised leading eigenvectors
    std::vector<double> eigenvalues;   ///< leading eigenvalues of the normalised affinity, ascending
};

/// Normalised-cut spectral clustering: the k leading eigenvectors of the
/// normalised affinity, rows scaled to unit length (zero rows stay zero),
/// then kmeans with 10 restarts.
SpectralResult spectral(const DataMatrix& x, std::size_t k, std::size_t n_neighbors, std::uint64_t seed);

/// Largest n the dense eigensolver route accepts.
inline constexpr std::size_t spectral_max_rows = 6000;

/// The seed-independent part of spectral(): eigenvalues and the row-normalised
/// embedding, labeling left empty.
SpectralResult spectral_embedding(const DataMatrix& x, std::size_t k, std::size_t n_neighbors);

/// The seeded k-means step; spectral(x, k, m, s) equals
/// spectral_assign(spectral_embedding(x, k, m), k, s).
Labeling spectral_assign(const SpectralResult& embedded, std::size_t k, std::uint64_t seed);

}  // namespace clab::cluster
