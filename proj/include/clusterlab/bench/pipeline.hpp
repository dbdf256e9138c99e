#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterlab/bench/config.hpp"
#include "clusterlab/data_io.hpp"
#include "clusterlab/labels.hpp"

namespace clab::bench {

struct RunRecord {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double ari = 0.0;
    double nmi = 0.0;
    std::optional<double> silhouette;
    std::optional<double> davies_bouldin;
    std::optional<double> calinski_harabasz;
    std::size_t n_clusters = 0;
    std::size_t n_noise = 0;
    double seconds = 0.0;  ///< clusterer call only
};

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;  ///< population
    std::size_t count = 0;
};

struct RunArtifact {
    PipelineConfig config;
    std::string dataset_name;
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    std::size_t clustering_dim = 0;
    std::size_t k = 0;
    std::optional<double> eps;  ///< resolved DBSCAN radius
    double reduction_seconds = 0.0;
    bool nonstandard_reduction = false;
    std::vector<RunRecord> runs;
    std::map<std::string, Aggregate> aggregates;  ///< keyed by metric name
    Labeling first_labeling;
    Matrix coords;            ///< clustering input, for embedding dumps
    std::vector<int> truth;   ///< ground-truth labels after subsampling
};

/// Loads the dataset named by the config (no standardisation).
io::LabeledDataset load_dataset(const DatasetConfig& cfg, std::uint64_t master_seed);

/// Load, standardise, subsample and reduce; the input every clusterer sees.
struct Prepared {
    io::LabeledDataset data;  ///< after standardisation and subsampling
    dimred::Embedding embedding;
    double reduction_seconds = 0.0;
};
Prepared prepare(const PipelineConfig& cfg);

/// The full pipeline: `runs` clusterer calls with seeds derive_seed(master, i),
/// all metrics per run, then mean/std aggregates. Errors carry the failing
/// stage in their message.
RunArtifact run_pipeline(const PipelineConfig& cfg);

/// Names of the aggregated metrics in report order.
const std::vector<std::string>& metric_names();

}  // namespace clab::bench
