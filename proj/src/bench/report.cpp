#include "clusterlab/bench/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "clusterlab/error.hpp"

namespace clab::bench {

using nlohmann::ordered_json;

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return io::format_double(v);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

ordered_json json_num(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (!std::isfinite(*v)) return num(*v);
    return *v;
}

std::string reduction_label(const PipelineConfig& p) {
    std::string s(dimred::to_string(p.reduction.method));
    if (p.reduction.method != dimred::Method::none) s += "-" + std::to_string(p.reduction.target_dim);
    return s;
}

std::string dataset_label(const PipelineConfig& p) {
    if (p.dataset.kind == DatasetKind::synth) return std::string(synth::to_string(p.dataset.synth.kind));
    return std::string(to_string(p.dataset.kind));
}

std::string error_text(const std::exception& e) {
    if (auto* ce = dynamic_cast<const Error*>(&e)) return "error[" + std::string(to_string(ce->kind())) + "]: " + e.what();
    if (dynamic_cast<const ConfigError*>(&e)) return std::string("error[config]: ") + e.what();
    return std::string("error: ") + e.what();
}

}  // namespace

std::size_t SuiteResult::failures() const {
    std::size_t f = 0;
    for (const auto& e : entries) f += !e.artifact.has_value();
    return f;
}

SuiteResult run_suite(const SuiteConfig& suite, std::size_t jobs) {
    require(!suite.pipelines.empty(), "suite: no pipelines");
    SuiteResult result;
    result.name = suite.name;
    result.entries.resize(suite.pipelines.size());
    auto work = [&](std::size_t i) {
        auto& entry = result.entries[i];
        entry.config = suite.pipelines[i];
        try {
            entry.artifact = run_pipeline(entry.config);
        } catch (const std::exception& e) {
            entry.error = error_text(e);
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, suite.pipelines.size());
    if (jobs == 1) {
        for (std::size_t i = 0; i < suite.pipelines.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < suite.pipelines.size(); i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

std::string metrics_csv(const SuiteResult& result) {
    std::string out =
        "pipeline,dataset,n_samples,clustering_dim,reduction,algorithm,k,eps,runs,noise_mode,"
        "ari_mean,ari_std,nmi_arith_mean,nmi_arith_std,silhouette_mean,silhouette_std,"
        "davies_bouldin_mean,davies_bouldin_std,calinski_harabasz_mean,calinski_harabasz_std,"
        "n_clusters_mean,n_noise_mean,status\n";
    for (const auto& e : result.entries) {
        const auto& p = e.config;
        std::vector<std::string> row{csv_field(p.name), csv_field(dataset_label(p))};
        if (e.artifact) {
            const auto& a = *e.artifact;
            row.push_back(std::to_string(a.n_samples));
            row.push_back(std::to_string(a.clustering_dim));
        } else {
            row.insert(row.end(), {"", ""});
        }
        row.push_back(reduction_label(p));
        row.push_back(std::string(to_string(p.clusterer.algorithm)));
        if (e.artifact) {
            const auto& a = *e.artifact;
            row.push_back(p.clusterer.algorithm == Algorithm::dbscan ? "" : std::to_string(a.k));
            row.push_back(opt_num(a.eps));
        } else {
            row.insert(row.end(), {"", ""});
        }
        row.push_back(std::to_string(p.runs));
        row.push_back(std::string(metrics::to_string(p.noise_mode)));
        for (const auto& m : metric_names()) {
            const bool with_std = m != "n_clusters" && m != "n_noise";
            if (!e.artifact || e.artifact->aggregates.at(m).count == 0) {
                row.push_back("");
                if (with_std) row.push_back("");
                continue;
            }
            const auto& ag = e.artifact->aggregates.at(m);
            row.push_back(num(ag.mean));
            if (with_std) row.push_back(num(ag.std));
        }
        row.push_back(e.artifact ? "ok" : csv_field(e.error));
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += '\n';
    }
    return out;
}

std::string timing_csv(const SuiteResult& result) {
    std::string out = "pipeline,reduction_seconds,cluster_seconds_mean,cluster_seconds_std,status\n";
    char buf[64];
    auto fixed = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    for (const auto& e : result.entries) {
        out += csv_field(e.config.name) + ",";
        if (e.artifact) {
            double mean = 0.0, var = 0.0;
            const auto& runs = e.artifact->runs;
            for (const auto& r : runs) mean += r.seconds / static_cast<double>(runs.size());
            for (const auto& r : runs) var += (r.seconds - mean) * (r.seconds - mean) / static_cast<double>(runs.size());
            out += fixed(e.artifact->reduction_seconds) + "," + fixed(mean) + "," + fixed(std::sqrt(var)) + ",ok\n";
        } else {
            out += ",,," + csv_field(e.error) + "\n";
        }
    }
    return out;
}

std::string detail_json(const SuiteResult& result) {
    ordered_json root;
    root["suite"] = result.name;
    root["nmi_normalization"] = "arithmetic";
    root["pipelines"] = ordered_json::array();
    for (const auto& e : result.entries) {
        const auto& p = e.config;
        ordered_json j;
        j["name"] = p.name;
        j["dataset"] = dataset_label(p);
        j["subsample"] = p.subsample ? ordered_json(*p.subsample) : ordered_json(nullptr);
        j["standardize"] = p.standardize;
        j["reduction"] = {{"method", dimred::to_string(p.reduction.method)},
                          {"target_dim", p.reduction.target_dim},
                          {"seed", p.reduction_seed.value_or(p.master_seed)}};
        j["algorithm"] = to_string(p.clusterer.algorithm);
        j["master_seed"] = p.master_seed;
        j["runs_requested"] = p.runs;
        j["noise_mode"] = metrics::to_string(p.noise_mode);
        if (!e.artifact) {
            j["status"] = e.error;
            root["pipelines"].push_back(j);
            continue;
        }
        const auto& a = *e.artifact;
        j["status"] = "ok";
        j["n_samples"] = a.n_samples;
        j["n_features"] = a.n_features;
        j["clustering_dim"] = a.clustering_dim;
        if (p.clusterer.algorithm == Algorithm::dbscan) {
            j["eps"] = *a.eps;
            j["eps_source"] = p.clusterer.eps ? "config" : "k-distance knee";
            j["min_pts"] = p.clusterer.min_pts;
        } else {
            j["k"] = a.k;
            if (p.clusterer.algorithm == Algorithm::kmeans) j["restarts"] = p.clusterer.restarts;
            if (p.clusterer.algorithm == Algorithm::spectral) j["n_neighbors"] = p.clusterer.n_neighbors;
        }
        if (a.nonstandard_reduction) j["note"] = "t-SNE with more than 3 output dimensions is nonstandard";
        ordered_json runs = ordered_json::array();
        for (const auto& r : a.runs)
            runs.push_back({{"run", r.run},
                            {"seed", r.seed},
                            {"ari", r.ari},
                            {"nmi", r.nmi},
                            {"silhouette", json_num(r.silhouette)},
                            {"davies_bouldin", json_num(r.davies_bouldin)},
                            {"calinski_harabasz", json_num(r.calinski_harabasz)},
                            {"n_clusters", r.n_clusters},
                            {"n_noise", r.n_noise}});
        j["runs"] = runs;
        ordered_json agg;
        for (const auto& m : metric_names()) {
            const auto& ag = a.aggregates.at(m);
            agg[m] = ag.count ? ordered_json{{"mean", json_num(ag.mean)}, {"std", json_num(ag.std)}, {"count", ag.count}}
                              : ordered_json(nullptr);
        }
        j["aggregates"] = agg;
        root["pipelines"].push_back(j);
    }
    return root.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
        if (ec) fail(ErrorKind::IoError, "cannot create directory " + file.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write " + file.string());
    out << text;
    if (!out) fail(ErrorKind::IoError, "write failed for " + file.string());
}

WrittenFiles write_suite(const SuiteResult& result, const std::filesystem::path& out_dir) {
    WrittenFiles w{out_dir / (result.name + ".csv"), out_dir / (result.name + "_timing.csv"),
                   out_dir / (result.name + ".json")};
    write_text_file(w.metrics, metrics_csv(result));
    write_text_file(w.timing, timing_csv(result));
    write_text_file(w.detail, detail_json(result));
    for (const auto& e : result.entries) {
        if (!e.artifact) continue;
        const auto& a = *e.artifact;
        if (e.config.dump_embedding) {
            std::filesystem::create_directories((out_dir / *e.config.dump_embedding).parent_path());
            io::write_matrix_csv(out_dir / *e.config.dump_embedding, a.coords, a.truth);
        }
        if (e.config.dump_labels) {
            std::string text = "row,truth,cluster\n";
            for (std::size_t i = 0; i < a.truth.size(); ++i)
                text += std::to_string(i) + "," + std::to_string(a.truth[i]) + "," +
                        std::to_string(a.first_labeling.assignments[i]) + "\n";
            write_text_file(out_dir / *e.config.dump_labels, text);
        }
    }
    return w;
}

StabilityResult stability_run(const PipelineConfig& cfg) {
    require(cfg.runs >= 2, "stability: needs at least 2 runs");
    StabilityResult s{run_pipeline(cfg), {}};
    std::vector<double> ari;
    for (const auto& r : s.artifact.runs) ari.push_back(r.ari);
    s.record = metrics::stability(ari);
    return s;
}

std::string stability_runs_csv(const StabilityResult& r) {
    std::string out = "run,seed,ari\n";
    for (const auto& run : r.artifact.runs)
        out += std::to_string(run.run) + "," + std::to_string(run.seed) + "," + num(run.ari) + "\n";
    return out;
}

std::string stability_summary_csv(const StabilityResult& r) {
    const auto& p = r.artifact.config;
    return "pipeline,dataset,reduction,algorithm,runs,ari_mean,ari_std,stability_score\n" + csv_field(p.name) + "," +
           csv_field(dataset_label(p)) + "," + reduction_label(p) + "," + std::string(to_string(p.clusterer.algorithm)) +
           "," + std::to_string(r.record.runs) + "," + num(r.record.mean) + "," + num(r.record.std) + "," +
           opt_num(r.record.score) + "\n";
}

}  // namespace clab::bench
