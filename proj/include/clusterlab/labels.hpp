#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clab {

/// Label for points a density-based clusterer leaves unassigned.
inline constexpr int kNoise = -1;

/// Cluster assignment per row. Non-noise ids are contiguous from 0.
struct Labeling {
    std::vector<int> assignments;
    std::size_t n_clusters = 0;

    std::size_t size() const noexcept { return assignments.size(); }
    std::size_t n_noise() const noexcept;
};

/// Relabels clusters 0.. in order of first appearance, keeping kNoise.
Labeling make_labeling(std::span<const int> raw);

}  // namespace clab
