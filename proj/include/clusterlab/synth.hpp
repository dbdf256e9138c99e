#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "clusterlab/data_io.hpp"

namespace clab::synth {

enum class Kind {
    well_separated_spherical,
    overlapping_spherical,
    moons,
    varied_density,
    high_noise,
    unbalanced,
};

std::string_view to_string(Kind kind) noexcept;
std::optional<Kind> parse_kind(std::string_view name) noexcept;

struct SynthSpec {
    Kind kind = Kind::well_separated_spherical;
    std::size_t n_samples = 600;
    std::size_t n_clusters = 3;
    double noise_fraction = 0.0;
    std::uint64_t seed = 0;
    std::size_t dim = 10;  ///< ignored for moons, which are always 2-D
};

/// Generator constants, in units of the per-cluster standard deviation.
namespace constants {
inline constexpr double separated_spacing = 10.0;
inline constexpr double overlapping_spacing = 2.5;
inline constexpr double density_ratio = 4.0;
inline constexpr double varied_density_spacing = 12.0;
inline constexpr double unbalanced_major_weight = 8.0;
inline constexpr double unbalanced_spacing = 5.0;
inline constexpr double moons_jitter = 0.06;
inline constexpr double high_noise_fraction = 0.15;
inline constexpr double high_noise_spacing = 10.0;
}  // namespace constants

/// Labels: 0 .. n_clusters-1 for cluster members, n_clusters for background
/// noise (high_noise only). Deterministic given the spec.
io::LabeledDataset generate(const SynthSpec& spec);

/// A spec with the default parameters for a kind (noise fraction 0.15 for
/// high_noise, two clusters in 2-D for moons).
SynthSpec default_spec(Kind kind, std::size_t n_samples, std::uint64_t seed);

}  // namespace clab::synth
