#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "clusterlab/clusterers.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/rng.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab::cluster {

namespace {

Matrix plus_plus_seeds(const DataMatrix& x, std::size_t k, Rng& rng) {
    const std::size_t n = x.rows();
    const auto& kern = simd::active();
    std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(n))};
    std::vector<bool> taken(n, false);
    taken[chosen[0]] = true;
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
        const double* last = x.row(chosen.back()).data();
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], kern.sq_l2(x.row(i).data(), last, x.cols()));
            total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            // Rounding can leave the target just past the last step.
            if (pick == n)
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
        }
        taken[pick] = true;
        chosen.push_back(pick);
    }
    return x.select_rows(chosen);
}

/// Nearest centroid per row, ties to the lower centroid index.
void assign(const DataMatrix& x, const Matrix& c, std::vector<int>& labels) {
    const auto& kern = simd::active();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t j = 0; j < c.rows(); ++j) {
            const double d = kern.sq_l2(x.row(i).data(), c.row(j).data(), x.cols());
            if (d < best) {
                best = d;
                arg = static_cast<int>(j);
            }
        }
        labels[i] = arg;
    }
}

double cost(const DataMatrix& x, const Matrix& c, const std::vector<int>& labels) {
    const auto& kern = simd::active();
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        s += kern.sq_l2(x.row(i).data(), c.row(static_cast<std::size_t>(labels[i])).data(), x.cols());
    return s;
}

void update_means(const DataMatrix& x, const std::vector<int>& labels, Matrix& c) {
    const auto& kern = simd::active();
    std::vector<double> count(c.rows(), 0.0);
    std::fill(c.data(), c.data() + c.size(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto j = static_cast<std::size_t>(labels[i]);
        kern.axpy(1.0, x.row(i).data(), c.row(j).data(), x.cols());
        count[j] += 1.0;
    }
    for (std::size_t j = 0; j < c.rows(); ++j)
        if (count[j] > 0.0)
            for (double& v : c.row(j)) v /= count[j];
}

/// Moves the point farthest from its centroid into each empty cluster.
/// Returns true if anything changed.
bool repair_empty(const DataMatrix& x, Matrix& c, std::vector<int>& labels) {
    std::vector<std::size_t> size(c.rows(), 0);
    for (int l : labels) ++size[static_cast<std::size_t>(l)];
    bool changed = false;
    const auto& kern = simd::active();
    for (std::size_t j = 0; j < c.rows(); ++j) {
        if (size[j] > 0) continue;
        std::size_t far = x.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto own = static_cast<std::size_t>(labels[i]);
            if (size[own] < 2) continue;
            const double d = kern.sq_l2(x.row(i).data(), c.row(own).data(), x.cols());
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        --size[static_cast<std::size_t>(labels[far])];
        labels[far] = static_cast<int>(j);
        size[j] = 1;
        std::copy(x.row(far).begin(), x.row(far).end(), c.row(j).begin());
        changed = true;
    }
    return changed;
}

}  // namespace

KMeansResult kmeans_once(const DataMatrix& x, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    validate_data(x, "kmeans");
    require(k >= 1, "kmeans: k must be at least 1");
    require(k <= x.rows(), "kmeans: k=" + std::to_string(k) + " exceeds the " + std::to_string(x.rows()) + " rows");

    Rng rng(seed);
    Matrix c = plus_plus_seeds(x, k, rng);
    std::vector<int> labels(x.rows());
    assign(x, c, labels);

    KMeansResult r;
    std::vector<int> next(x.rows());
    while (true) {
        repair_empty(x, c, labels);
        update_means(x, labels, c);
        ++r.iterations_run;
        r.inertia_history.push_back(cost(x, c, labels));

        assign(x, c, next);
        if (next == labels) break;
        labels.swap(next);
        const std::size_t h = r.inertia_history.size();
        if (h >= 2) {
            const double prev = r.inertia_history[h - 2], cur = r.inertia_history[h - 1];
            if (prev - cur < options.tolerance * prev) break;
        }
        if (r.iterations_run >= options.max_iterations) break;
    }
    repair_empty(x, c, labels);
    update_means(x, labels, c);
    r.inertia = cost(x, c, labels);
    if (r.inertia != r.inertia_history.back()) r.inertia_history.push_back(r.inertia);

    // With k <= n the repair always finds a donor, so all k clusters are used.
    r.centroids = std::move(c);
    r.labeling.assignments = std::move(labels);
    r.labeling.n_clusters = k;
    r.restart_inertias = {r.inertia};
    return r;
}

KMeansResult kmeans(const DataMatrix& x, std::size_t k, std::size_t restarts, std::uint64_t seed,
                    const KMeansOptions& options) {
    require(restarts >= 1, "kmeans: restarts must be at least 1");
    KMeansResult best;
    std::vector<double> all;
    for (std::size_t r = 0; r < restarts; ++r) {
        KMeansResult cur = kmeans_once(x, k, derive_seed(seed, r), options);
        all.push_back(cur.inertia);
        if (r == 0 || cur.inertia < best.inertia) {
            best = std::move(cur);
            best.best_restart = r;
        }
    }
    best.restart_inertias = std::move(all);
    return best;
}

}  // namespace clab::cluster
