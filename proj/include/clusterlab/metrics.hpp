#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "clusterlab/labels.hpp"
#include "clusterlab/matrix.hpp"

namespace clab::metrics {

/// How external metrics treat points the prediction marks as noise.
enum class NoiseMode {
    as_cluster,  ///< noise is one more cluster id
    exclude,     ///< noise points are dropped from both labelings
};

std::string_view to_string(NoiseMode mode) noexcept;
std::optional<NoiseMode> parse_noise_mode(std::string_view name) noexcept;

/// Adjusted Rand index from the contingency table. 1.0 when the expected and
/// maximum index coincide (both labelings a single cluster, for instance).
double ari(std::span<const int> truth, std::span<const int> pred, NoiseMode mode = NoiseMode::as_cluster);

/// Mutual information over the arithmetic mean of the two entropies, natural
/// logs. 1.0 when both entropies are 0; 0.0 when exactly one is.
double nmi(std::span<const int> truth, std::span<const int> pred, NoiseMode mode = NoiseMode::as_cluster);

/// Mean silhouette over non-noise points; singletons contribute 0. Absent
/// with fewer than two clusters.
std::optional<double> silhouette(const DataMatrix& x, std::span<const int> labels);

/// Noise points excluded. Needs two clusters; coincident centroids throw
/// NumericalFailure naming the pair.
double davies_bouldin(const DataMatrix& x, std::span<const int> labels);

/// Noise points excluded. Needs 2 <= k < n; +inf when the within-cluster
/// dispersion is zero.
double calinski_harabasz(const DataMatrix& x, std::span<const int> labels);

struct StabilityRecord {
    double mean = 0.0;
    double std = 0.0;                 ///< population standard deviation
    std::optional<double> score;      ///< 1 - std/mean clamped to [0, 1]; absent when mean <= 0
    std::size_t runs = 0;
};

/// Spread of per-run ARI values. Needs at least two values.
StabilityRecord stability(std::span<const double> values);

}  // namespace clab::metrics
