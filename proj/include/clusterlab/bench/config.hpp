#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/dimred.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/synth.hpp"

namespace clab::bench {

inline constexpr int kSchemaVersion = 1;

enum class DatasetKind { mnist, fashion_mnist, har, synth, csv };
enum class Algorithm { kmeans, dbscan, spectral };

std::string_view to_string(DatasetKind kind) noexcept;
std::string_view to_string(Algorithm algo) noexcept;

struct DatasetConfig {
    DatasetKind kind = DatasetKind::synth;
    std::vector<std::filesystem::path> features;  ///< IDX images, HAR feature files, or one CSV
    std::vector<std::filesystem::path> labels;
    synth::SynthSpec synth;
    bool synth_seed_set = false;  ///< otherwise the pipeline's master seed is used
};

struct ClustererConfig {
    Algorithm algorithm = Algorithm::kmeans;
    std::optional<std::size_t> k;  ///< defaults to the number of ground-truth classes
    std::size_t restarts = 10;
    std::optional<double> eps;     ///< absent means estimate from the k-distance knee
    std::size_t min_pts = 10;
    std::size_t n_neighbors = 10;
};

struct PipelineConfig {
    std::string name;
    DatasetConfig dataset;
    std::optional<std::size_t> subsample;
    bool standardize = true;
    dimred::ReductionSpec reduction;
    std::optional<std::uint64_t> reduction_seed;  ///< defaults to master_seed
    ClustererConfig clusterer;
    std::size_t runs = 10;
    std::uint64_t master_seed = 0;
    metrics::NoiseMode noise_mode = metrics::NoiseMode::as_cluster;
    std::optional<std::filesystem::path> dump_embedding;
    std::optional<std::filesystem::path> dump_labels;
};

struct SuiteConfig {
    std::string name;
    std::vector<PipelineConfig> pipelines;
};

/// Thrown for any problem with the configuration itself.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a config file. A file with a "pipelines" array is a suite whose
/// entries are merged over its optional "defaults" object; any other file is
/// a single pipeline. Relative paths resolve against the file's directory.
/// Unknown keys are rejected.
SuiteConfig load_config(const std::filesystem::path& file);
SuiteConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                         const std::string& fallback_name);

/// Command-line overrides applied to every pipeline.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<metrics::NoiseMode> noise_mode;
    std::optional<std::size_t> subsample;
};

void apply(SuiteConfig& suite, const Overrides& o);

/// Parses a synthetic data spec (same keys as a config's dataset.synth).
synth::SynthSpec parse_synth_spec(const std::string& text);

}  // namespace clab::bench
