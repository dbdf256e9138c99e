#include "clusterlab/bench/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "clusterlab/clusterers.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"

namespace clab::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs f, prefixing any error message with the stage name.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.what());
    }
}

Aggregate aggregate(const std::vector<double>& v) {
    Aggregate a;
    a.count = v.size();
    if (v.empty()) return a;
    // Deviations from the first value keep identical runs at exactly zero spread.
    double shift = 0.0;
    for (double x : v) shift += x - v[0];
    shift /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - v[0] - shift) * (x - v[0] - shift);
    a.mean = v[0] + shift;
    a.std = std::sqrt(var / static_cast<double>(v.size()));
    return a;
}

struct Internal {
    std::optional<double> silhouette, davies_bouldin, calinski_harabasz;
};

Internal internal_metrics(const DataMatrix& x, const Labeling& l) {
    Internal m;
    if (l.n_clusters < 2) return m;
    m.silhouette = metrics::silhouette(x, l.assignments);
    try {
        m.davies_bouldin = metrics::davies_bouldin(x, l.assignments);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NumericalFailure) throw;
    }
    if (l.n_clusters < l.size() - l.n_noise()) m.calinski_harabasz = metrics::calinski_harabasz(x, l.assignments);
    return m;
}

}  // namespace

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"ari",           "nmi",        "silhouette", "davies_bouldin",
                                                "calinski_harabasz", "n_clusters", "n_noise"};
    return names;
}

io::LabeledDataset load_dataset(const DatasetConfig& cfg, std::uint64_t master_seed) {
    switch (cfg.kind) {
        case DatasetKind::mnist:
        case DatasetKind::fashion_mnist:
            return io::load_idx(cfg.features, cfg.labels, std::string(to_string(cfg.kind)));
        case DatasetKind::har: return io::load_har(cfg.features, cfg.labels, "har");
        case DatasetKind::csv: return io::read_csv(cfg.features.at(0), cfg.features.at(0).stem().string());
        case DatasetKind::synth: {
            synth::SynthSpec spec = cfg.synth;
            if (!cfg.synth_seed_set) spec.seed = master_seed;
            return synth::generate(spec);
        }
    }
    fail(ErrorKind::InvalidInput, "unknown dataset kind");
}

Prepared prepare(const PipelineConfig& cfg) {
    Prepared p;
    p.data = stage("load", [&] { return load_dataset(cfg.dataset, cfg.master_seed); });
    if (cfg.standardize) p.data.data = stage("standardize", [&] { return io::standardize(p.data.data).data; });
    if (cfg.subsample && *cfg.subsample != p.data.size())
        p.data = stage("subsample", [&] { return io::subsample(p.data, *cfg.subsample, cfg.master_seed); });
    dimred::ReductionSpec spec = cfg.reduction;
    spec.seed = cfg.reduction_seed.value_or(cfg.master_seed);
    const auto t0 = Clock::now();
    p.embedding = stage("reduce", [&] { return dimred::reduce(p.data.data, spec); });
    p.reduction_seconds = seconds_since(t0);
    return p;
}

RunArtifact run_pipeline(const PipelineConfig& cfg) {
    Prepared prep = prepare(cfg);
    const Matrix& x = prep.embedding.coords;
    const auto& c = cfg.clusterer;

    RunArtifact art;
    art.config = cfg;
    art.dataset_name = prep.data.name;
    art.n_samples = prep.data.size();
    art.n_features = prep.data.data.cols();
    art.clustering_dim = x.cols();
    art.reduction_seconds = prep.reduction_seconds;
    art.nonstandard_reduction = prep.embedding.nonstandard;
    // Synthetic noise carries its own truth label, which is not a cluster to find.
    art.k = c.k.value_or(cfg.dataset.kind == DatasetKind::synth ? cfg.dataset.synth.n_clusters : prep.data.n_classes());
    if (c.algorithm == Algorithm::dbscan)
        art.eps = c.eps ? *c.eps : stage("eps", [&] { return cluster::auto_eps(x, c.min_pts); });

    // The spectral embedding does not depend on the run seed: compute it once and
    // charge its time to every run.
    std::optional<cluster::SpectralResult> spectral;
    double spectral_seconds = 0.0;
    if (c.algorithm == Algorithm::spectral) {
        const auto t0 = Clock::now();
        spectral = stage("cluster", [&] { return cluster::spectral_embedding(x, art.k, c.n_neighbors); });
        spectral_seconds = seconds_since(t0);
    }

    std::map<std::vector<int>, Internal> cache;
    for (std::size_t i = 0; i < cfg.runs; ++i) {
        RunRecord r;
        r.run = i;
        r.seed = derive_seed(cfg.master_seed, i);
        const auto t0 = Clock::now();
        Labeling l = stage("cluster", [&] {
            switch (c.algorithm) {
                case Algorithm::kmeans: return cluster::kmeans(x, art.k, c.restarts, r.seed).labeling;
                case Algorithm::dbscan: return cluster::dbscan(x, {*art.eps, c.min_pts});
                case Algorithm::spectral: return cluster::spectral_assign(*spectral, art.k, r.seed);
            }
            fail(ErrorKind::InvalidInput, "unknown algorithm");
        });
        r.seconds = seconds_since(t0) + spectral_seconds;

        if (c.algorithm == Algorithm::dbscan && i > 0 && l.assignments != art.first_labeling.assignments)
            fail(ErrorKind::NumericalFailure, "cluster: dbscan runs produced different labelings");
        stage("evaluate", [&] {
            r.ari = metrics::ari(prep.data.labels, l.assignments, cfg.noise_mode);
            r.nmi = metrics::nmi(prep.data.labels, l.assignments, cfg.noise_mode);
            auto it = cache.find(l.assignments);
            if (it == cache.end()) it = cache.emplace(l.assignments, internal_metrics(x, l)).first;
            r.silhouette = it->second.silhouette;
            r.davies_bouldin = it->second.davies_bouldin;
            r.calinski_harabasz = it->second.calinski_harabasz;
            return 0;
        });
        r.n_clusters = l.n_clusters;
        r.n_noise = l.n_noise();
        if (i == 0) art.first_labeling = std::move(l);
        art.runs.push_back(r);
    }

    std::map<std::string, std::vector<double>> values;
    for (const auto& r : art.runs) {
        values["ari"].push_back(r.ari);
        values["nmi"].push_back(r.nmi);
        if (r.silhouette) values["silhouette"].push_back(*r.silhouette);
        if (r.davies_bouldin) values["davies_bouldin"].push_back(*r.davies_bouldin);
        if (r.calinski_harabasz) values["calinski_harabasz"].push_back(*r.calinski_harabasz);
        values["n_clusters"].push_back(static_cast<double>(r.n_clusters));
        values["n_noise"].push_back(static_cast<double>(r.n_noise));
    }
    for (const auto& name : metric_names()) art.aggregates[name] = aggregate(values[name]);
    art.coords = std::move(prep.embedding.coords);
    art.truth = std::move(prep.data.labels);
    return art;
}

}  // namespace clab::bench
