#include "clusterlab/labels.hpp"

#include <algorithm>
#include <unordered_map>

namespace clab {

std::size_t Labeling::n_noise() const noexcept {
    return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), kNoise));
}

Labeling make_labeling(std::span<const int> raw) {
    Labeling out;
    out.assignments.reserve(raw.size());
    std::unordered_map<int, int> ids;
    for (int r : raw) {
        if (r == kNoise) {
            out.assignments.push_back(kNoise);
            continue;
        }
        auto [it, inserted] = ids.try_emplace(r, static_cast<int>(ids.size()));
        out.assignments.push_back(it->second);
    }
    out.n_clusters = ids.size();
    return out;
}

}  // namespace clab
