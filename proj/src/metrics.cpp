#include "clusterlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "clusterlab/error.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab::metrics {

std::string_view to_string(NoiseMode mode) noexcept {
    return mode == NoiseMode::exclude ? "exclude" : "as_cluster";
}

std::optional<NoiseMode> parse_noise_mode(std::string_view name) noexcept {
    if (name == "as_cluster") return NoiseMode::as_cluster;
    if (name == "exclude") return NoiseMode::exclude;
    return std::nullopt;
}

namespace {

struct Contingency {
    std::vector<std::vector<double>> cells;  // truth class x pred class
    std::vector<double> rows, cols;
    double n = 0.0;
};

std::vector<int> dense_ids(std::span<const int> raw, std::size_t& count) {
    std::map<int, int> ids;
    for (int r : raw) ids.emplace(r, 0);
    int next = 0;
    for (auto& [_, id] : ids) id = next++;
    count = ids.size();
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ids[raw[i]];
    return out;
}

Contingency contingency(std::span<const int> truth, std::span<const int> pred, NoiseMode mode) {
    require(truth.size() == pred.size(), "metrics: labelings differ in length (" + std::to_string(truth.size()) +
                                             " vs " + std::to_string(pred.size()) + ")");
    std::vector<int> t, p;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (mode == NoiseMode::exclude && pred[i] == kNoise) continue;
        t.push_back(truth[i]);
        p.push_back(pred[i]);
    }
    std::size_t nt = 0, np = 0;
    const auto ti = dense_ids(t, nt);
    const auto pi = dense_ids(p, np);
    Contingency c;
    c.cells.assign(nt, std::vector<double>(np, 0.0));
    c.rows.assign(nt, 0.0);
    c.cols.assign(np, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        c.cells[ti[i]][pi[i]] += 1.0;
        c.rows[ti[i]] += 1.0;
        c.cols[pi[i]] += 1.0;
    }
    c.n = static_cast<double>(t.size());
    return c;
}

double pairs(double m) { return m * (m - 1.0) / 2.0; }

double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= c / n * std::log(c / n);
    return h;
}

/// Non-noise rows grouped by dense cluster id.
struct Groups {
    std::vector<std::vector<std::size_t>> members;
    std::size_t n = 0;
};

Groups group(const DataMatrix& x, std::span<const int> labels, const char* who) {
    require(labels.size() == x.rows(), std::string(who) + ": label count differs from row count");
    validate_data(x, who);
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != kNoise) by_label[labels[i]].push_back(i);
    Groups g;
    for (auto& [_, rows] : by_label) {
        g.n += rows.size();
        g.members.push_back(std::move(rows));
    }
    return g;
}

std::vector<double> centroid(const DataMatrix& x, const std::vector<std::size_t>& rows) {
    std::vector<double> c(x.cols(), 0.0);
    for (std::size_t r : rows)
        for (std::size_t j = 0; j < x.cols(); ++j) c[j] += x(r, j);
    for (double& v : c) v /= static_cast<double>(rows.size());
    return c;
}

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

}  // namespace

double ari(std::span<const int> truth, std::span<const int> pred, NoiseMode mode) {
    const auto c = contingency(truth, pred, mode);
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& row : c.cells)
        for (double v : row) index += pairs(v);
    for (double a : c.rows) sum_a += pairs(a);
    for (double b : c.cols) sum_b += pairs(b);
    const double total = pairs(c.n);
    const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double nmi(std::span<const int> truth, std::span<const int> pred, NoiseMode mode) {
    const auto c = contingency(truth, pred, mode);
    if (c.n == 0.0) return 1.0;
    const double hu = entropy(c.rows, c.n);
    const double hv = entropy(c.cols, c.n);
    if (hu == 0.0 && hv == 0.0) return 1.0;
    if (hu == 0.0 || hv == 0.0) return 0.0;
    double mi = 0.0;
    for (std::size_t i = 0; i < c.rows.size(); ++i)
        for (std::size_t j = 0; j < c.cols.size(); ++j) {
            const double v = c.cells[i][j];
            if (v > 0.0) mi += v / c.n * std::log(c.n * v / (c.rows[i] * c.cols[j]));
        }
    return std::clamp(mi / (0.5 * (hu + hv)), 0.0, 1.0);
}

std::optional<double> silhouette(const DataMatrix& x, std::span<const int> labels) {
    const auto g = group(x, labels, "silhouette");
    if (g.members.size() < 2) return std::nullopt;

    std::vector<std::size_t> kept;
    std::vector<std::size_t> cluster_of;
    for (std::size_t c = 0; c < g.members.size(); ++c)
        for (std::size_t r : g.members[c]) {
            kept.push_back(r);
            cluster_of.push_back(c);
        }
    const Matrix sub = x.select_rows(kept);

    double total = 0.0;
    std::vector<double> sums(g.members.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t own = cluster_of[i];
        if (g.members[own].size() == 1) continue;  // singleton contributes 0
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i) sums[cluster_of[j]] += std::sqrt(simd::sq_l2(sub.row(i), sub.row(j)));
        const double a = sums[own] / static_cast<double>(g.members[own].size() - 1);
        double b = INFINITY;
        for (std::size_t c = 0; c < sums.size(); ++c)
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(g.members[c].size()));
        const double m = std::max(a, b);
        if (m > 0.0) total += (b - a) / m;
    }
    return total / static_cast<double>(kept.size());
}

double davies_bouldin(const DataMatrix& x, std::span<const int> labels) {
    const auto g = group(x, labels, "davies_bouldin");
    require(g.members.size() >= 2, "davies_bouldin: needs at least 2 clusters");
    const std::size_t k = g.members.size();
    std::vector<std::vector<double>> cents(k);
    std::vector<double> spread(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        cents[c] = centroid(x, g.members[c]);
        for (std::size_t r : g.members[c]) spread[c] += dist(x.row(r), cents[c]);
        spread[c] /= static_cast<double>(g.members[c].size());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const double m = dist(cents[i], cents[j]);
            if (m == 0.0)
                fail(ErrorKind::NumericalFailure, "davies_bouldin: clusters " + std::to_string(std::min(i, j)) +
                                                      " and " + std::to_string(std::max(i, j)) +
                                                      " have coincident centroids");
            worst = std::max(worst, (spread[i] + spread[j]) / m);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double calinski_harabasz(const DataMatrix& x, std::span<const int> labels) {
    const auto g = group(x, labels, "calinski_harabasz");
    const std::size_t k = g.members.size();
    require(k >= 2 && k < g.n, "calinski_harabasz: needs 2 <= clusters < points");
    std::vector<std::size_t> all;
    for (const auto& m : g.members) all.insert(all.end(), m.begin(), m.end());
    const auto overall = centroid(x, all);
    double between = 0.0, within = 0.0;
    for (const auto& m : g.members) {
        const auto c = centroid(x, m);
        const double gap = dist(c, overall);
        between += static_cast<double>(m.size()) * gap * gap;
        for (std::size_t r : m) {
            const double e = dist(x.row(r), c);
            within += e * e;
        }
    }
    if (within == 0.0) return INFINITY;
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(g.n - k));
}

StabilityRecord stability(std::span<const double> values) {
    require(values.size() >= 2, "stability: needs at least 2 values");
    StabilityRecord r;
    r.runs = values.size();
    // Deviations from the first value, so identical inputs give exactly 0.
    const double n = static_cast<double>(values.size());
    double shift = 0.0;
    for (double v : values) shift += v - values[0];
    shift /= n;
    double var = 0.0;
    for (double v : values) var += (v - values[0] - shift) * (v - values[0] - shift);
    r.mean = values[0] + shift;
    r.std = std::sqrt(var / n);
    if (r.mean > 0.0) r.score = std::clamp(1.0 - r.std / r.mean, 0.0, 1.0);
    return r;
}

}  // namespace clab::metrics
