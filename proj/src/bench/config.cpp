#include "clusterlab/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "clusterlab/error.hpp"

namespace clab::bench {

using nlohmann::json;

std::string_view to_string(DatasetKind kind) noexcept {
    switch (kind) {
        case DatasetKind::mnist: return "mnist";
        case DatasetKind::fashion_mnist: return "fashion_mnist";
        case DatasetKind::har: return "har";
        case DatasetKind::synth: return "synth";
        case DatasetKind::csv: return "csv";
    }
    return "unknown";
}

std::string_view to_string(Algorithm algo) noexcept {
    switch (algo) {
        case Algorithm::kmeans: return "kmeans";
        case Algorithm::dbscan: return "dbscan";
        case Algorithm::spectral: return "spectral";
    }
    return "unknown";
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& msg) { throw ConfigError(where + ": " + msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
}

std::uint64_t get_uint(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    bad(where, "expected a non-negative integer");
}

std::size_t get_count(const json& j, const std::string& where, std::size_t min = 1) {
    const auto v = get_uint(j, where);
    if (v < min) bad(where, "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

double get_real(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where, "expected a string");
    return j.get<std::string>();
}

std::vector<std::filesystem::path> get_paths(const json& j, const std::string& where,
                                             const std::filesystem::path& base) {
    std::vector<std::filesystem::path> out;
    auto add = [&](const json& v) {
        std::filesystem::path p = get_string(v, where);
        out.push_back(p.is_absolute() ? p : base / p);
    };
    if (j.is_array()) {
        if (j.empty()) bad(where, "expected at least one path");
        for (const auto& v : j) add(v);
    } else {
        add(j);
    }
    return out;
}

synth::SynthSpec parse_synth(const json& j, const std::string& where, bool& seed_set) {
    check_keys(j, where, {"kind", "n_samples", "n_clusters", "noise_fraction", "seed", "dim"});
    if (!j.contains("kind")) bad(where, "missing 'kind'");
    const auto kind = synth::parse_kind(get_string(j["kind"], where + ".kind"));
    if (!kind) bad(where + ".kind", "unknown synthetic kind '" + j["kind"].get<std::string>() + "'");
    const std::size_t n = j.contains("n_samples") ? get_count(j["n_samples"], where + ".n_samples") : 600;
    synth::SynthSpec spec = synth::default_spec(*kind, n, 0);
    if (j.contains("n_clusters")) spec.n_clusters = get_count(j["n_clusters"], where + ".n_clusters");
    if (j.contains("noise_fraction")) spec.noise_fraction = get_real(j["noise_fraction"], where + ".noise_fraction");
    if (j.contains("dim")) spec.dim = get_count(j["dim"], where + ".dim");
    seed_set = j.contains("seed");
    if (seed_set) spec.seed = get_uint(j["seed"], where + ".seed");
    return spec;
}

DatasetConfig parse_dataset(const json& j, const std::filesystem::path& base) {
    const std::string where = "dataset";
    if (!j.is_object() || !j.contains("kind")) bad(where, "expected an object with 'kind'");
    const std::string kind = get_string(j["kind"], where + ".kind");
    DatasetConfig d;
    if (kind == "mnist" || kind == "fashion_mnist") {
        check_keys(j, where, {"kind", "images", "labels"});
        d.kind = kind == "mnist" ? DatasetKind::mnist : DatasetKind::fashion_mnist;
        if (!j.contains("images") || !j.contains("labels")) bad(where, "needs 'images' and 'labels'");
        d.features = get_paths(j["images"], where + ".images", base);
        d.labels = get_paths(j["labels"], where + ".labels", base);
    } else if (kind == "har") {
        check_keys(j, where, {"kind", "features", "labels"});
        d.kind = DatasetKind::har;
        if (!j.contains("features") || !j.contains("labels")) bad(where, "needs 'features' and 'labels'");
        d.features = get_paths(j["features"], where + ".features", base);
        d.labels = get_paths(j["labels"], where + ".labels", base);
    } else if (kind == "csv") {
        check_keys(j, where, {"kind", "path"});
        d.kind = DatasetKind::csv;
        if (!j.contains("path")) bad(where, "needs 'path'");
        d.features = get_paths(j["path"], where + ".path", base);
        if (d.features.size() != 1) bad(where + ".path", "expected a single file");
    } else if (kind == "synth") {
        check_keys(j, where, {"kind", "synth"});
        d.kind = DatasetKind::synth;
        if (!j.contains("synth")) bad(where, "needs a 'synth' object");
        d.synth = parse_synth(j["synth"], where + ".synth", d.synth_seed_set);
    } else {
        bad(where + ".kind", "unknown dataset kind '" + kind + "'");
    }
    return d;
}

void parse_reduction(const json& j, PipelineConfig& p) {
    const std::string where = "reduction";
    auto& r = p.reduction;
    if (j.is_null()) return;
    if (j.is_string()) {
        const auto m = dimred::parse_method(j.get<std::string>());
        if (!m || *m != dimred::Method::none) bad(where, "a string value may only be \"none\"");
        return;
    }
    check_keys(j, where,
               {"method", "target_dim", "seed", "perplexity", "iterations", "n_neighbors", "min_dist", "epochs"});
    if (!j.contains("method")) bad(where, "missing 'method'");
    const auto m = dimred::parse_method(get_string(j["method"], where + ".method"));
    if (!m) bad(where + ".method", "unknown method '" + j["method"].get<std::string>() + "'");
    r.method = *m;
    if (j.contains("target_dim")) r.target_dim = get_count(j["target_dim"], where + ".target_dim");
    if (j.contains("seed")) p.reduction_seed = get_uint(j["seed"], where + ".seed");
    if (j.contains("perplexity")) r.tsne.perplexity = get_real(j["perplexity"], where + ".perplexity");
    if (j.contains("iterations")) r.tsne.iterations = get_count(j["iterations"], where + ".iterations");
    if (j.contains("n_neighbors")) r.umap.n_neighbors = get_count(j["n_neighbors"], where + ".n_neighbors", 2);
    if (j.contains("min_dist")) r.umap.min_dist = get_real(j["min_dist"], where + ".min_dist");
    if (j.contains("epochs")) r.umap.epochs = get_count(j["epochs"], where + ".epochs");
}

ClustererConfig parse_clusterer(const json& j) {
    const std::string where = "clusterer";
    if (!j.is_object() || !j.contains("algorithm")) bad(where, "expected an object with 'algorithm'");
    const std::string algo = get_string(j["algorithm"], where + ".algorithm");
    ClustererConfig c;
    if (algo == "kmeans") {
        check_keys(j, where, {"algorithm", "k", "restarts"});
        c.algorithm = Algorithm::kmeans;
        if (j.contains("restarts")) c.restarts = get_count(j["restarts"], where + ".restarts");
    } else if (algo == "dbscan") {
        check_keys(j, where, {"algorithm", "eps", "min_pts"});
        c.algorithm = Algorithm::dbscan;
        if (j.contains("eps") && !(j["eps"].is_string() && j["eps"] == "auto")) {
            c.eps = get_real(j["eps"], where + ".eps");
            if (!(*c.eps > 0.0)) bad(where + ".eps", "must be positive or \"auto\"");
        }
        if (j.contains("min_pts")) c.min_pts = get_count(j["min_pts"], where + ".min_pts");
        if (!c.eps && c.min_pts < 2) bad(where + ".min_pts", "automatic eps needs min_pts >= 2");
    } else if (algo == "spectral") {
        check_keys(j, where, {"algorithm", "k", "n_neighbors"});
        c.algorithm = Algorithm::spectral;
        if (j.contains("n_neighbors")) c.n_neighbors = get_count(j["n_neighbors"], where + ".n_neighbors");
    } else {
        bad(where + ".algorithm", "unknown algorithm '" + algo + "'");
    }
    if (j.contains("k")) c.k = get_count(j["k"], where + ".k");
    return c;
}

std::string default_name(const PipelineConfig& p) {
    std::string data(to_string(p.dataset.kind));
    if (p.dataset.kind == DatasetKind::synth) data = std::string(synth::to_string(p.dataset.synth.kind));
    std::string red(dimred::to_string(p.reduction.method));
    if (p.reduction.method != dimred::Method::none) red += std::to_string(p.reduction.target_dim);
    return data + "-" + red + "-" + std::string(to_string(p.clusterer.algorithm));
}

PipelineConfig parse_pipeline(const json& j, const std::filesystem::path& base) {
    check_keys(j, "pipeline",
               {"schema_version", "name", "dataset", "subsample", "standardize", "reduction", "clusterer", "runs",
                "master_seed", "noise_mode", "dump_embedding", "dump_labels"});
    PipelineConfig p;
    if (!j.contains("dataset")) bad("pipeline", "missing 'dataset'");
    if (!j.contains("clusterer")) bad("pipeline", "missing 'clusterer'");
    p.dataset = parse_dataset(j["dataset"], base);
    p.clusterer = parse_clusterer(j["clusterer"]);
    if (j.contains("reduction")) parse_reduction(j["reduction"], p);
    if (j.contains("subsample") && !j["subsample"].is_null()) p.subsample = get_count(j["subsample"], "subsample");
    if (j.contains("standardize")) {
        if (!j["standardize"].is_boolean()) bad("standardize", "expected true or false");
        p.standardize = j["standardize"].get<bool>();
    }
    if (j.contains("runs")) p.runs = get_count(j["runs"], "runs");
    if (j.contains("master_seed")) p.master_seed = get_uint(j["master_seed"], "master_seed");
    if (j.contains("noise_mode")) {
        const auto m = metrics::parse_noise_mode(get_string(j["noise_mode"], "noise_mode"));
        if (!m) bad("noise_mode", "expected \"as_cluster\" or \"exclude\"");
        p.noise_mode = *m;
    }
    auto out_path = [&](const char* key) {
        std::filesystem::path f = get_string(j[key], key);
        return f;  // relative to --out-dir, resolved when written
    };
    if (j.contains("dump_embedding")) p.dump_embedding = out_path("dump_embedding");
    if (j.contains("dump_labels")) p.dump_labels = out_path("dump_labels");
    p.name = j.contains("name") ? get_string(j["name"], "name") : default_name(p);
    return p;
}

void check_schema(const json& j) {
    if (!j.is_object()) bad("config", "expected a JSON object");
    if (!j.contains("schema_version")) bad("config", "missing 'schema_version'");
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion)
        bad("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
}

}  // namespace

SuiteConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                         const std::string& fallback_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    check_schema(j);
    SuiteConfig suite;
    if (j.contains("pipelines")) {
        check_keys(j, "suite", {"schema_version", "name", "defaults", "pipelines"});
        suite.name = j.contains("name") ? get_string(j["name"], "name") : fallback_name;
        const json defaults = j.contains("defaults") ? j["defaults"] : json::object();
        if (!defaults.is_object()) bad("defaults", "expected an object");
        if (!j["pipelines"].is_array() || j["pipelines"].empty()) bad("pipelines", "expected a non-empty array");
        std::size_t i = 0;
        for (const auto& entry : j["pipelines"]) {
            json merged = defaults;
            merged.merge_patch(entry);
            try {
                suite.pipelines.push_back(parse_pipeline(merged, base_dir));
            } catch (const ConfigError& e) {
                throw ConfigError("pipelines[" + std::to_string(i) + "]." + e.what());
            }
            ++i;
        }
    } else {
        suite.pipelines.push_back(parse_pipeline(j, base_dir));
        suite.name = j.contains("name") ? suite.pipelines[0].name : fallback_name;
    }
    return suite;
}

SuiteConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::IoError, "cannot open config " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), file.parent_path(), file.stem().string());
}

void apply(SuiteConfig& suite, const Overrides& o) {
    for (auto& p : suite.pipelines) {
        if (o.seed) p.master_seed = *o.seed;
        if (o.noise_mode) p.noise_mode = *o.noise_mode;
        if (o.subsample) p.subsample = *o.subsample;
    }
}

synth::SynthSpec parse_synth_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("synth spec: malformed JSON: ") + e.what());
    }
    bool seed_set = false;
    return parse_synth(j, "synth", seed_set);
}

}  // namespace clab::bench
