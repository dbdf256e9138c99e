#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "clusterlab/dimred.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/neighbors.hpp"
#include "clusterlab/rng.hpp"

namespace clab::dimred {

namespace {

constexpr double kSigmaTolerance = 1e-5;
constexpr std::size_t kSigmaSteps = 128;
constexpr double kGradClip = 4.0;

double clip(double v) { return std::clamp(v, -kGradClip, kGradClip); }

double solve_sigma(const std::vector<double>& dist, double rho, double target) {
    double lo = 0.0, hi = INFINITY, sigma = 1.0;
    for (std::size_t step = 0; step < kSigmaSteps; ++step) {
        double sum = 0.0;
        for (double d : dist) sum += std::exp(-std::max(0.0, d - rho) / sigma);
        if (std::abs(sum - target) < kSigmaTolerance) break;
        if (sum > target) {
            hi = sigma;
            sigma = 0.5 * (lo + hi);
        } else {
            lo = sigma;
            sigma = hi == INFINITY ? sigma * 2.0 : 0.5 * (lo + hi);
        }
    }
    return sigma;
}

}  // namespace

FuzzyGraph fuzzy_graph(const DataMatrix& x, std::size_t n_neighbors) {
    validate_data(x, "umap");
    const std::size_t n = x.rows();
    require(n_neighbors >= 2 && n_neighbors < n, "umap: n_neighbors must be in [2, n-1]");
    const auto knn = neighbors::knn_graph(neighbors::NeighborIndex(x), n_neighbors);
    const double target = std::log2(static_cast<double>(n_neighbors));

    FuzzyGraph g;
    g.rho.resize(n);
    g.sigma.resize(n);
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& dist = knn[i].distances;
        g.rho[i] = dist.front();
        g.sigma[i] = solve_sigma(dist, g.rho[i], target);
        for (std::size_t t = 0; t < dist.size(); ++t) {
            const double w = std::exp(-std::max(0.0, dist[t] - g.rho[i]) / g.sigma[i]);
            if (w <= 0.0) continue;
            const std::size_t j = knn[i].indices[t];
            auto& slot = pairs[{std::min(i, j), std::max(i, j)}];
            (i < j ? slot.first : slot.second) = w;
        }
    }
    for (const auto& [key, w] : pairs) {
        const double s = w.first + w.second - w.first * w.second;
        g.edges.push_back({key.first, key.second, s});
        g.edges.push_back({key.second, key.first, s});
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const FuzzyEdge& a, const FuzzyEdge& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; });
    return g;
}

std::pair<double, double> fit_curve(double min_dist, double spread) {
    require(min_dist >= 0.0 && spread > 0.0, "umap: min_dist must be >= 0 and spread > 0");
    constexpr std::size_t kPoints = 300;
    std::vector<double> r(kPoints), target(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) {
        r[i] = 3.0 * static_cast<double>(i + 1) / static_cast<double>(kPoints);
        target[i] = r[i] <= min_dist ? 1.0 : std::exp(-(r[i] - min_dist) / spread);
    }
    auto cost = [&](double a, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < kPoints; ++i) {
            const double e = 1.0 / (1.0 + a * std::pow(r[i], 2.0 * b)) - target[i];
            s += e * e;
        }
        return s;
    };

    // Levenberg-Marquardt from (1, 1).
    double a = 1.0, b = 1.0, lambda = 1e-3, current = cost(a, b);
    for (int it = 0; it < 500; ++it) {
        double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
        for (std::size_t i = 0; i < kPoints; ++i) {
            const double rb = std::pow(r[i], 2.0 * b);
            const double den = 1.0 + a * rb;
            const double res = 1.0 / den - target[i];
            const double da = -rb / (den * den);
            const double db = -a * rb * 2.0 * std::log(r[i]) / (den * den);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * res;
            gb += db * res;
        }
        bool accepted = false;
        while (lambda < 1e20) {
            const double maa = jaa * (1.0 + lambda), mbb = jbb * (1.0 + lambda);
            const double det = maa * mbb - jab * jab;
            const double step_a = -(mbb * ga - jab * gb) / det;
            const double step_b = -(maa * gb - jab * ga) / det;
            const double trial = cost(a + step_a, b + step_b);
            if (trial <= current) {
                const bool done = std::abs(step_a) <= 1e-15 * std::abs(a) && std::abs(step_b) <= 1e-15 * std::abs(b);
                a += step_a;
                b += step_b;
                current = trial;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = !done;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    return {a, b};
}

Embedding umap_lite(const DataMatrix& x, std::size_t target_dim, const UmapParams& params, std::uint64_t seed) {
    require(target_dim >= 1, "umap: target_dim must be at least 1");
    require(params.epochs >= 1, "umap: epochs must be at least 1");
    const FuzzyGraph graph = fuzzy_graph(x, params.n_neighbors);
    const auto [a, b] = fit_curve(params.min_dist, params.spread);
    const std::size_t n = x.rows(), dim = target_dim;

    Matrix y;
    if (dim <= std::min(n - 1, x.cols())) y = pca(x, dim).coords;
    double peak = 0.0;
    for (double v : y.values()) peak = std::max(peak, std::abs(v));
    Rng rng(seed);
    if (y.empty() || peak == 0.0) {
        y = Matrix(n, dim);
        for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = rng.uniform(-10.0, 10.0);
    } else {
        for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] *= 10.0 / peak;
    }

    double max_w = 0.0;
    for (const auto& e : graph.edges) max_w = std::max(max_w, e.weight);
    const double epochs = static_cast<double>(params.epochs);
    std::vector<FuzzyEdge> edges;
    for (const auto& e : graph.edges)
        if (e.weight >= max_w / epochs) edges.push_back(e);

    std::vector<double> per_sample(edges.size()), next_sample(edges.size()), per_negative(edges.size()),
        next_negative(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        per_sample[k] = max_w / edges[k].weight;
        next_sample[k] = per_sample[k];
        per_negative[k] = per_sample[k] / static_cast<double>(params.negative_samples);
        next_negative[k] = per_negative[k];
    }

    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const double ep = static_cast<double>(epoch);
        const double alpha = params.learning_rate * (1.0 - ep / epochs);
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (next_sample[k] > ep) continue;
            const std::size_t i = edges[k].from, j = edges[k].to;
            double* yi = y.row(i).data();
            double* yj = y.row(j).data();
            double d2 = 0.0;
            for (std::size_t c = 0; c < dim; ++c) d2 += (yi[c] - yj[c]) * (yi[c] - yj[c]);
            if (d2 > 0.0) {
                const double coef = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
                for (std::size_t c = 0; c < dim; ++c) {
                    const double g = clip(coef * (yi[c] - yj[c])) * alpha;
                    yi[c] += g;
                    yj[c] -= g;
                }
            }
            next_sample[k] += per_sample[k];

            const auto negatives = static_cast<std::size_t>((ep - next_negative[k]) / per_negative[k]);
            for (std::size_t s = 0; s < negatives; ++s) {
                const auto m = static_cast<std::size_t>(rng.below(n));
                if (m == i) continue;
                const double* ym = y.row(m).data();
                double dn = 0.0;
                for (std::size_t c = 0; c < dim; ++c) dn += (yi[c] - ym[c]) * (yi[c] - ym[c]);
                const double coef = dn > 0.0 ? 2.0 * b / ((0.001 + dn) * (a * std::pow(dn, b) + 1.0)) : 0.0;
                for (std::size_t c = 0; c < dim; ++c)
                    yi[c] += (coef > 0.0 ? clip(coef * (yi[c] - ym[c])) : kGradClip) * alpha;
            }
            next_negative[k] += static_cast<double>(negatives) * per_negative[k];
        }
    }
    if (!y.all_finite()) fail(ErrorKind::NumericalFailure, "umap: layout diverged");
    Embedding e;
    e.method = "umap";
    e.coords = std::move(y);
    return e;
}

}  // namespace clab::dimred
