#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clab::neighbors {

struct Neighbors {
    std::vector<std::size_t> indices;
    std::vector<double> distances;  ///< Euclidean, ascending
};

/// Exact vantage-point tree over the rows of a data matrix. Holds its own
/// copy of the points laid out in tree order; read-only once built, so
/// concurrent queries are safe.
class NeighborIndex {
public:
    explicit NeighborIndex(const DataMatrix& x, std::size_t leaf_size = 16);

    std::size_t size() const noexcept { return order_.size(); }
    std::size_t dim() const noexcept { return points_.cols(); }
    std::size_t leaf_size() const noexcept { return leaf_size_; }

    /// The k nearest rows, ascending by distance with ties broken by the lower
    /// row index. Throws InvalidInput unless 1 <= k <= size().
    Neighbors knn(std::span<const double> query, std::size_t k) const;

    /// knn() for an indexed row with that row itself left out.
    Neighbors knn_excluding(std::span<const double> query, std::size_t k, std::size_t self) const;

    /// Every row within distance <= eps, sorted by row index.
    std::vector<std::size_t> radius(std::span<const double> query, double eps) const;

    /// knn_excluding() for every indexed row, indexed by original row. Rows
    /// are searched in blocks of spatially close queries sharing one
    /// traversal; answers are identical to the one-at-a-time search.
    std::vector<Neighbors> all_knn(std::size_t k) const;

private:
    struct Node {
        std::size_t begin = 0;  ///< vantage point sits at begin for inner nodes
        std::size_t end = 0;
        bool leaf = true;
        std::size_t inside = 0;
        std::size_t outside = 0;
        double inside_lo = 0.0, inside_hi = 0.0;
        double outside_lo = 0.0, outside_hi = 0.0;
    };

    std::size_t build(std::size_t begin, std::size_t end, std::vector<std::size_t>& perm, const DataMatrix& x);
    double distance_to(std::span<const double> q, std::size_t pos) const;
    struct Batch;
    void search_batch(Batch& batch, std::size_t node, std::size_t first, std::size_t last) const;

    Matrix points_;                  ///< rows in tree order
    std::vector<std::size_t> order_; ///< tree position -> original row
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

NeighborIndex build_index(const DataMatrix& x);

/// For every indexed row, its k nearest other rows.
std::vector<Neighbors> knn_graph(const NeighborIndex& index, std::size_t k);

/// Each row's distance to its k-th nearest other row, sorted descending.
/// Requires 1 <= k < rows.
std::vector<double> k_distance_profile(const DataMatrix& x, std::size_t k);

/// Knee of a descending k-distance profile: the entry farthest from the chord
/// joining the first and last points. A profile with no knee (all points on
/// the chord) falls back to its median. Throws DegenerateInput for an all-zero
/// profile and InvalidInput for fewer than 3 entries.
double estimate_eps(std::span<const double> profile);

}  // namespace clab::neighbors
