#include "clusterlab/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "clusterlab/error.hpp"
#include "clusterlab/rng.hpp"

namespace clab::synth {

namespace {

constexpr std::array<std::pair<Kind, std::string_view>, 6> kNames{{
    {Kind::well_separated_spherical, "well_separated_spherical"},
    {Kind::overlapping_spherical, "overlapping_spherical"},
    {Kind::moons, "moons"},
    {Kind::varied_density, "varied_density"},
    {Kind::high_noise, "high_noise"},
    {Kind::unbalanced, "unbalanced"},
}};

/// Sizes proportional to weights, largest remainder, ties to the lower index.
std::vector<std::size_t> split_sizes(std::size_t total, const std::vector<double>& weights) {
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    std::vector<std::size_t> sizes(weights.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / wsum;
        sizes[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += sizes[i];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++sizes[rem[r % rem.size()].second];
    return sizes;
}

/// Centers with pairwise distance `spacing`: scaled simplex vertices when
/// k <= dim, evenly spaced along the first axis otherwise.
std::vector<std::vector<double>> centers(std::size_t k, std::size_t dim, double spacing) {
    std::vector<std::vector<double>> c(k, std::vector<double>(dim, 0.0));
    if (k <= dim) {
        for (std::size_t i = 0; i < k; ++i) c[i][i] = spacing / std::numbers::sqrt2;
    } else {
        for (std::size_t i = 0; i < k; ++i) c[i][0] = spacing * static_cast<double>(i);
    }
    return c;
}

struct Builder {
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t dim;

    void gaussian(Rng& rng, const std::vector<double>& center, double sigma, std::size_t count, int label) {
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < dim; ++j) values.push_back(center[j] + sigma * rng.normal());
            labels.push_back(label);
        }
    }
};

void validate(const SynthSpec& spec) {
    require(spec.n_clusters >= 1, "synth: n_clusters must be >= 1");
    require(spec.n_samples >= 10 * spec.n_clusters, "synth: n_samples must be >= 10 * n_clusters");
    require(spec.noise_fraction >= 0.0 && spec.noise_fraction < 1.0, "synth: noise_fraction must lie in [0, 1)");
    require(spec.noise_fraction == 0.0 || spec.kind == Kind::high_noise,
            "synth: noise_fraction > 0 is only valid for high_noise");
    if (spec.kind == Kind::moons) {
        require(spec.n_clusters == 2, "synth: moons always have 2 clusters");
    } else {
        require(spec.dim >= 1, "synth: dim must be >= 1");
    }
}

io::LabeledDataset spherical(const SynthSpec& spec, Rng& rng, double spacing, std::size_t count,
                             const std::vector<double>& weights, const std::vector<double>& sigmas) {
    Builder b{{}, {}, spec.dim};
    const auto c = centers(spec.n_clusters, spec.dim, spacing);
    const auto sizes = split_sizes(count, weights);
    for (std::size_t i = 0; i < spec.n_clusters; ++i) b.gaussian(rng, c[i], sigmas[i], sizes[i], static_cast<int>(i));
    return {DataMatrix(b.labels.size(), spec.dim, std::move(b.values)), std::move(b.labels),
            std::string(to_string(spec.kind))};
}

}  // namespace

std::string_view to_string(Kind kind) noexcept {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<Kind> parse_kind(std::string_view name) noexcept {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

SynthSpec default_spec(Kind kind, std::size_t n_samples, std::uint64_t seed) {
    SynthSpec s;
    s.kind = kind;
    s.n_samples = n_samples;
    s.seed = seed;
    if (kind == Kind::moons) {
        s.n_clusters = 2;
        s.dim = 2;
    }
    if (kind == Kind::high_noise) s.noise_fraction = constants::high_noise_fraction;
    return s;
}

io::LabeledDataset generate(const SynthSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const std::size_t k = spec.n_clusters;
    const std::vector<double> equal(k, 1.0);
    const std::vector<double> unit(k, 1.0);

    switch (spec.kind) {
        case Kind::well_separated_spherical:
            return spherical(spec, rng, constants::separated_spacing, spec.n_samples, equal, unit);
        case Kind::overlapping_spherical:
            return spherical(spec, rng, constants::overlapping_spacing, spec.n_samples, equal, unit);
        case Kind::varied_density: {
            std::vector<double> sigmas(k, 1.0);
            for (std::size_t i = 0; i < k && k > 1; ++i)
                sigmas[i] = std::pow(constants::density_ratio, static_cast<double>(i) / static_cast<double>(k - 1));
            return spherical(spec, rng, constants::varied_density_spacing, spec.n_samples, equal, sigmas);
        }
        case Kind::unbalanced: {
            std::vector<double> weights(k, 1.0);
            weights[0] = constants::unbalanced_major_weight;
            return spherical(spec, rng, constants::unbalanced_spacing, spec.n_samples, weights, unit);
        }
        case Kind::high_noise: {
            const auto n_noise =
                static_cast<std::size_t>(std::llround(spec.noise_fraction * static_cast<double>(spec.n_samples)));
            auto ds = spherical(spec, rng, constants::high_noise_spacing, spec.n_samples - n_noise, equal, unit);
            // Uniform background over the cluster bounding box widened by 3 sigma.
            std::vector<double> lo(spec.dim, INFINITY), hi(spec.dim, -INFINITY);
            for (const auto& c : centers(k, spec.dim, constants::high_noise_spacing))
                for (std::size_t j = 0; j < spec.dim; ++j) {
                    lo[j] = std::min(lo[j], c[j] - 3.0);
                    hi[j] = std::max(hi[j], c[j] + 3.0);
                }
            std::vector<double> values = ds.data.values();
            for (std::size_t i = 0; i < n_noise; ++i) {
                for (std::size_t j = 0; j < spec.dim; ++j) values.push_back(rng.uniform(lo[j], hi[j]));
                ds.labels.push_back(static_cast<int>(k));
            }
            ds.data = DataMatrix(spec.n_samples, spec.dim, std::move(values));
            return ds;
        }
        case Kind::moons: {
            const std::size_t outer = (spec.n_samples + 1) / 2;
            const std::size_t inner = spec.n_samples - outer;
            std::vector<double> values;
            std::vector<int> labels;
            auto arc = [&](std::size_t count, bool lower) {
                for (std::size_t i = 0; i < count; ++i) {
                    const double t = count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1)
                                               : 0.0;
                    const double x = lower ? 1.0 - std::cos(t) : std::cos(t);
                    const double y = lower ? 0.5 - std::sin(t) : std::sin(t);
                    values.push_back(x + constants::moons_jitter * rng.normal());
                    values.push_back(y + constants::moons_jitter * rng.normal());
                    labels.push_back(lower ? 1 : 0);
                }
            };
            arc(outer, false);
            arc(inner, true);
            return {DataMatrix(spec.n_samples, 2, std::move(values)), std::move(labels), "moons"};
        }
    }
    fail(ErrorKind::InvalidInput, "synth: unknown kind");
}

}  // namespace clab::synth
