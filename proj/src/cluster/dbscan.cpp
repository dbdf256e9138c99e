#include <cmath>
#include <string>

#include "clusterlab/clusterers.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/neighbors.hpp"

namespace clab::cluster {

Labeling dbscan(const DataMatrix& x, const DbscanParams& params) {
    validate_data(x, "dbscan");
    require(std::isfinite(params.eps) && params.eps > 0.0, "dbscan: eps must be positive");
    require(params.min_pts >= 1, "dbscan: min_pts must be at least 1");
    const std::size_t n = x.rows();
    const neighbors::NeighborIndex index(x);

    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = index.radius(x.row(i), params.eps).size() >= params.min_pts;

    Labeling out;
    out.assignments.assign(n, kNoise);
    int next = 0;
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || out.assignments[i] != kNoise) continue;
        out.assignments[i] = next;
        frontier.assign(1, i);
        while (!frontier.empty()) {
            const std::size_t p = frontier.back();
            frontier.pop_back();
            for (std::size_t q : index.radius(x.row(p), params.eps))
                if (core[q] && out.assignments[q] == kNoise) {
                    out.assignments[q] = next;
                    frontier.push_back(q);
                }
        }
        ++next;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (std::size_t q : index.radius(x.row(i), params.eps))  // ascending row order
            if (core[q]) {
                out.assignments[i] = out.assignments[q];
                break;
            }
    }
    out.n_clusters = static_cast<std::size_t>(next);
    return out;
}

double auto_eps(const DataMatrix& x, std::size_t min_pts) {
    require(min_pts >= 2, "auto eps: min_pts must be at least 2");
    return neighbors::estimate_eps(neighbors::k_distance_profile(x, min_pts - 1));
}

}  // namespace clab::cluster
