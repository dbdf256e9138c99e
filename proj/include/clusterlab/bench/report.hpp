#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clusterlab/bench/pipeline.hpp"

namespace clab::bench {

/// One suite entry: an artifact or the error that stopped the pipeline.
struct SuiteEntry {
    PipelineConfig config;
    std::optional<RunArtifact> artifact;
    std::string error;
};

struct SuiteResult {
    std::string name;
    std::vector<SuiteEntry> entries;
    std::size_t failures() const;
};

/// Runs every pipeline, isolating failures. `jobs` > 1 runs pipelines on
/// worker threads; output order is always config order.
SuiteResult run_suite(const SuiteConfig& suite, std::size_t jobs = 1);

/// Metrics table, one row per pipeline. Holds no timing, so identical
/// configs give identical bytes.
std::string metrics_csv(const SuiteResult& result);
/// Wall-clock seconds per pipeline.
std::string timing_csv(const SuiteResult& result);
/// Full per-run detail (without timing).
std::string detail_json(const SuiteResult& result);

struct WrittenFiles {
    std::filesystem::path metrics, timing, detail;
};
/// Writes <name>.csv, <name>_timing.csv and <name>.json into out_dir.
WrittenFiles write_suite(const SuiteResult& result, const std::filesystem::path& out_dir);

struct StabilityResult {
    RunArtifact artifact;
    metrics::StabilityRecord record;
};
StabilityResult stability_run(const PipelineConfig& cfg);
std::string stability_runs_csv(const StabilityResult& r);
std::string stability_summary_csv(const StabilityResult& r);

void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace clab::bench
