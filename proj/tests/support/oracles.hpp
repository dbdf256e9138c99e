#pragma once

// Direct-definition reference implementations: no indexing, no shortcuts.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "clusterlab/labels.hpp"
#include "clusterlab/matrix.hpp"

namespace clab::oracle {

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

/// Rand-style agreement by enumerating all pairs.
inline double ari(std::span<const int> u, std::span<const int> v) {
    const std::size_t n = u.size();
    double both = 0, in_u = 0, in_v = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool su = u[i] == u[j], sv = v[i] == v[j];
            both += su && sv;
            in_u += su;
            in_v += sv;
            total += 1;
        }
    const double expected = total > 0 ? in_u * in_v / total : 0.0;
    const double max_index = 0.5 * (in_u + in_v);
    if (max_index == expected) return 1.0;
    return (both - expected) / (max_index - expected);
}

/// Entropies and mutual information from joint frequencies.
inline double nmi(std::span<const int> u, std::span<const int> v) {
    const double n = static_cast<double>(u.size());
    std::map<int, double> pu, pv;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < u.size(); ++i) {
        pu[u[i]] += 1.0 / n;
        pv[v[i]] += 1.0 / n;
        joint[{u[i], v[i]}] += 1.0 / n;
    }
    double hu = 0, hv = 0, mi = 0;
    for (auto& [_, p] : pu) hu -= p * std::log(p);
    for (auto& [_, p] : pv) hv -= p * std::log(p);
    for (auto& [key, p] : joint) mi += p * std::log(p / (pu[key.first] * pv[key.second]));
    if (hu == 0 && hv == 0) return 1.0;
    if (hu == 0 || hv == 0) return 0.0;
    return mi / ((hu + hv) / 2);
}

inline std::optional<double> silhouette(const Matrix& x, std::span<const int> labels) {
    std::set<int> ids;
    for (int l : labels)
        if (l != kNoise) ids.insert(l);
    if (ids.size() < 2) return std::nullopt;
    double total = 0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == kNoise) continue;
        ++counted;
        std::map<int, double> sum, cnt;
        for (std::size_t j = 0; j < x.rows(); ++j) {
            if (j == i || labels[j] == kNoise) continue;
            sum[labels[j]] += distance(x.row(i), x.row(j));
            cnt[labels[j]] += 1;
        }
        if (cnt[labels[i]] == 0) continue;
        const double a = sum[labels[i]] / cnt[labels[i]];
        double b = INFINITY;
        for (int c : ids)
            if (c != labels[i]) b = std::min(b, sum[c] / cnt[c]);
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(counted);
}

inline std::map<int, std::vector<double>> centroids(const Matrix& x, std::span<const int> labels) {
    std::map<int, std::vector<double>> c;
    std::map<int, double> cnt;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == kNoise) continue;
        auto& v = c[labels[i]];
        v.resize(x.cols(), 0.0);
        for (std::size_t j = 0; j < x.cols(); ++j) v[j] += x(i, j);
        cnt[labels[i]] += 1;
    }
    for (auto& [l, v] : c)
        for (double& e : v) e /= cnt[l];
    return c;
}

inline double davies_bouldin(const Matrix& x, std::span<const int> labels) {
    auto c = centroids(x, labels);
    std::map<int, double> s, cnt;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == kNoise) continue;
        s[labels[i]] += distance(x.row(i), c[labels[i]]);
        cnt[labels[i]] += 1;
    }
    double total = 0;
    for (auto& [i, ci] : c) {
        double worst = 0;
        for (auto& [j, cj] : c)
            if (i != j) worst = std::max(worst, (s[i] / cnt[i] + s[j] / cnt[j]) / distance(ci, cj));
        total += worst;
    }
    return total / static_cast<double>(c.size());
}

inline double calinski_harabasz(const Matrix& x, std::span<const int> labels) {
    auto c = centroids(x, labels);
    std::vector<double> mean(x.cols(), 0.0);
    double n = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == kNoise) continue;
        for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
        n += 1;
    }
    for (double& m : mean) m /= n;
    double b = 0, w = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == kNoise) continue;
        const double dw = distance(x.row(i), c[labels[i]]);
        const double db = distance(c[labels[i]], mean);
        w += dw * dw;
        b += db * db;
    }
    const double k = static_cast<double>(c.size());
    if (w == 0) return INFINITY;
    return (b / (k - 1)) / (w / (n - k));
}

/// DBSCAN by breadth-first expansion over an all-pairs neighbour scan.
inline std::vector<int> dbscan(const Matrix& x, double eps, std::size_t min_pts) {
    const std::size_t n = x.rows();
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (distance(x.row(i), x.row(j)) <= eps) nbrs[i].push_back(j);
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_pts;
    std::vector<int> label(n, kNoise);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || label[i] != kNoise) continue;
        std::vector<std::size_t> frontier{i};
        label[i] = next;
        while (!frontier.empty()) {
            const std::size_t p = frontier.back();
            frontier.pop_back();
            for (std::size_t q : nbrs[p])
                if (core[q] && label[q] == kNoise) {
                    label[q] = next;
                    frontier.push_back(q);
                }
        }
        ++next;
    }
    // Border points: the cluster of their lowest-index core neighbour.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (std::size_t q : nbrs[i])
            if (core[q]) {
                label[i] = label[q];
                break;
            }
    }
    return label;
}

/// True when the two labelings induce the same partition and noise set.
inline bool same_partition(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == kNoise) != (b[i] == kNoise)) return false;
        if (a[i] == kNoise) continue;
        auto [it1, new1] = ab.emplace(a[i], b[i]);
        auto [it2, new2] = ba.emplace(b[i], a[i]);
        if (it1->second != b[i] || it2->second != a[i]) return false;
    }
    return true;
}

}  // namespace clab::oracle
