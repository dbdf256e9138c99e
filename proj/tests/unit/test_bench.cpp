#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clusterlab/bench/config.hpp"
#include "clusterlab/bench/pipeline.hpp"
#include "clusterlab/bench/report.hpp"
#include "clusterlab/error.hpp"
#include "support/temp_dir.hpp"

using namespace clab;
using namespace clab::bench;
using clab::testing::TempDir;
using clab::testing::write_text;

namespace {

PipelineConfig parse_one(const std::string& text, const std::filesystem::path& base = ".") {
    auto suite = parse_config(text, base, "t");
    REQUIRE(suite.pipelines.size() == 1);
    return suite.pipelines[0];
}

const char* kMoons = R"({"schema_version": 1,
  "dataset": {"kind": "synth", "synth": {"kind": "moons", "n_samples": 400}},
  "clusterer": {"algorithm": "dbscan", "eps": "auto", "min_pts": 10}, "runs": 3, "master_seed": 5})";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLUSTERLAB_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Four points on a line, two obvious clusters: k-means has a unique optimum.
std::filesystem::path forced_optimum_csv(const TempDir& dir) {
    const auto p = dir / "forced.csv";
    write_text(p, "x,label\n0,0\n1,0\n9,1\n10,1\n");
    return p;
}

}  // namespace

TEST_CASE("config: defaults and derived name") {
    const auto p = parse_one(kMoons);
    CHECK(p.dataset.kind == DatasetKind::synth);
    CHECK(p.dataset.synth.kind == synth::Kind::moons);
    CHECK(p.dataset.synth.n_samples == 400);
    CHECK_FALSE(p.dataset.synth_seed_set);
    CHECK(p.clusterer.algorithm == Algorithm::dbscan);
    CHECK_FALSE(p.clusterer.eps.has_value());
    CHECK(p.clusterer.min_pts == 10);
    CHECK(p.runs == 3);
    CHECK(p.master_seed == 5);
    CHECK(p.standardize);
    CHECK(p.noise_mode == metrics::NoiseMode::as_cluster);
    CHECK(p.reduction.method == dimred::Method::none);
    CHECK(p.name == "moons-none-dbscan");
}

TEST_CASE("config: unknown keys are rejected at every level") {
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "clusterer":{"algorithm":"kmeans"},"rnus":3})"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons","nosie":1}},
        "clusterer":{"algorithm":"kmeans"}})"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "clusterer":{"algorithm":"kmeans","eps":0.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "reduction":{"method":"pca","dims":2},"clusterer":{"algorithm":"kmeans"}})"), ConfigError);
}

TEST_CASE("config: schema version and value checks") {
    const std::string body = R"("dataset":{"kind":"synth","synth":{"kind":"moons"}},"clusterer":{"algorithm":"kmeans"})";
    CHECK_THROWS_AS(parse_one("{" + body + "}"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":2,)" + body + "}"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"runs":0,)" + body + "}"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"noise_mode":"drop",)" + body + "}"), ConfigError);
    CHECK_THROWS_AS(parse_one("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "clusterer":{"algorithm":"dbscan","eps":-1}})"), ConfigError);
    CHECK_THROWS_AS(parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "clusterer":{"algorithm":"dbscan","min_pts":1}})"), ConfigError);
    const auto p = parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"moons"}},
        "clusterer":{"algorithm":"dbscan","eps":0.25,"min_pts":1}})");
    CHECK(*p.clusterer.eps == 0.25);
}

TEST_CASE("config: suite defaults merge and relative paths resolve against the config directory") {
    const auto suite = parse_config(R"({"schema_version":1,"name":"s",
        "defaults":{"runs":2,"dataset":{"kind":"csv","path":"data/a.csv"},"clusterer":{"algorithm":"kmeans","k":2}},
        "pipelines":[{"name":"one"},{"name":"two","runs":4,"clusterer":{"algorithm":"spectral","k":3}}]})",
                                    "/cfg", "fallback");
    REQUIRE(suite.pipelines.size() == 2);
    CHECK(suite.name == "s");
    CHECK(suite.pipelines[0].runs == 2);
    CHECK(suite.pipelines[1].runs == 4);
    CHECK(suite.pipelines[1].clusterer.algorithm == Algorithm::spectral);
    CHECK(*suite.pipelines[1].clusterer.k == 3);
    CHECK(suite.pipelines[0].dataset.features.at(0) == std::filesystem::path("/cfg/data/a.csv"));

    CHECK_THROWS_WITH_AS(parse_config(R"({"schema_version":1,"pipelines":[
        {"dataset":{"kind":"synth","synth":{"kind":"moons"}},"clusterer":{"algorithm":"kmeans"}},
        {"dataset":{"kind":"synth","synth":{"kind":"moons"}},"clusterer":{"algorithm":"kmeans"},"extra":1}]})",
                                      ".", "f"),
                         doctest::Contains("pipelines[1]"), ConfigError);
}

TEST_CASE("config: overrides replace seed, noise mode and subsample") {
    auto suite = parse_config(kMoons, ".", "t");
    apply(suite, {std::uint64_t{99}, metrics::NoiseMode::exclude, std::size_t{50}});
    CHECK(suite.pipelines[0].master_seed == 99);
    CHECK(suite.pipelines[0].noise_mode == metrics::NoiseMode::exclude);
    CHECK(*suite.pipelines[0].subsample == 50);
}

TEST_CASE("pipeline: dbscan on moons gives identical runs and zero spread") {
    const auto art = run_pipeline(parse_one(kMoons));
    REQUIRE(art.runs.size() == 3);
    CHECK(art.eps.has_value());
    for (const auto& r : art.runs) CHECK(r.ari == art.runs[0].ari);
    CHECK(art.aggregates.at("ari").std == 0.0);
    CHECK(art.aggregates.at("nmi").std == 0.0);
    CHECK(art.aggregates.at("ari").mean >= 0.9);
    CHECK(art.runs[0].seed != art.runs[1].seed);
}

TEST_CASE("pipeline: a single run aggregates to itself") {
    auto p = parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"overlapping_spherical","n_samples":200}},
        "clusterer":{"algorithm":"kmeans","restarts":2},"runs":1})");
    const auto art = run_pipeline(p);
    REQUIRE(art.runs.size() == 1);
    CHECK(art.k == 3);
    CHECK(art.aggregates.at("ari").mean == art.runs[0].ari);
    CHECK(art.aggregates.at("ari").std == 0.0);
    CHECK(art.aggregates.at("silhouette").mean == *art.runs[0].silhouette);
}

TEST_CASE("pipeline: errors name the failing stage") {
    auto p = parse_one(R"({"schema_version":1,"dataset":{"kind":"csv","path":"/nonexistent/x.csv"},
        "clusterer":{"algorithm":"kmeans","k":2}})");
    CHECK_THROWS_WITH(run_pipeline(p), doctest::Contains("load:"));
    try {
        run_pipeline(p);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
    }
    TempDir dir;
    auto q = parse_one(R"({"schema_version":1,"dataset":{"kind":"csv","path":"forced.csv"},
        "clusterer":{"algorithm":"kmeans","k":7}})",
                       dir.path());
    forced_optimum_csv(dir);
    CHECK_THROWS_WITH(run_pipeline(q), doctest::Contains("cluster:"));
}

TEST_CASE("pipeline: reduction and subsample are applied before clustering") {
    auto p = parse_one(R"({"schema_version":1,"dataset":{"kind":"synth","synth":{"kind":"well_separated_spherical","n_samples":300}},
        "subsample":120,"standardize":false,"reduction":{"method":"pca","target_dim":2},"clusterer":{"algorithm":"kmeans"},"runs":2})");
    const auto art = run_pipeline(p);
    CHECK(art.n_samples == 120);
    CHECK(art.n_features == 10);
    CHECK(art.clustering_dim == 2);
    CHECK(art.coords.rows() == 120);
    CHECK(art.truth.size() == 120);
    CHECK(art.aggregates.at("ari").mean > 0.95);
}

TEST_CASE("suite: a failing pipeline is isolated in its own row") {
    auto suite = parse_config(R"({"schema_version":1,"name":"iso","pipelines":[
        {"name":"good","dataset":{"kind":"synth","synth":{"kind":"moons","n_samples":200}},
         "clusterer":{"algorithm":"kmeans"},"runs":2},
        {"name":"bad","dataset":{"kind":"csv","path":"/nonexistent/missing.csv"},"clusterer":{"algorithm":"kmeans","k":2}}]})",
                              ".", "iso");
    const auto result = run_suite(suite);
    CHECK(result.failures() == 1);
    CHECK(result.entries[0].artifact.has_value());
    CHECK_FALSE(result.entries[1].artifact.has_value());
    const auto csv = metrics_csv(result);
    std::istringstream in(csv);
    std::string header, good, bad, extra;
    std::getline(in, header);
    std::getline(in, good);
    std::getline(in, bad);
    CHECK_FALSE(std::getline(in, extra));
    CHECK(good.rfind("good,", 0) == 0);
    CHECK(good.substr(good.size() - 3) == ",ok");
    CHECK(bad.rfind("bad,", 0) == 0);
    CHECK(bad.find("error[IoError]") != std::string::npos);
    CHECK(bad.find("missing.csv") != std::string::npos);
}

TEST_CASE("suite: identical configs give byte-identical reports and JSON carries the aggregates' inputs") {
    auto suite = parse_config(R"({"schema_version":1,"name":"det","defaults":{"runs":4,"master_seed":3},"pipelines":[
        {"dataset":{"kind":"synth","synth":{"kind":"overlapping_spherical","n_samples":240}},"clusterer":{"algorithm":"kmeans","restarts":1}},
        {"dataset":{"kind":"synth","synth":{"kind":"high_noise","n_samples":240}},"clusterer":{"algorithm":"dbscan"}},
        {"dataset":{"kind":"synth","synth":{"kind":"moons","n_samples":240}},"clusterer":{"algorithm":"spectral"}}]})",
                              ".", "det");
    TempDir a, b;
    const auto wa = write_suite(run_suite(suite), a.path());
    const auto wb = write_suite(run_suite(suite, 2), b.path());
    CHECK(read_file(wa.metrics) == read_file(wb.metrics));
    CHECK(read_file(wa.detail) == read_file(wb.detail));
    CHECK(std::filesystem::exists(wa.timing));

    const auto j = nlohmann::json::parse(read_file(wa.detail));
    CHECK(j["nmi_normalization"] == "arithmetic");
    for (const auto& p : j["pipelines"]) {
        for (const char* m : {"ari", "nmi"}) {
            std::vector<double> v;
            for (const auto& r : p["runs"]) v.push_back(r[m].get<double>());
            double mean = 0.0, var = 0.0;
            for (double x : v) mean += x / static_cast<double>(v.size());
            for (double x : v) var += (x - mean) * (x - mean) / static_cast<double>(v.size());
            CHECK(std::abs(p["aggregates"][m]["mean"].get<double>() - mean) <= 1e-12);
            CHECK(std::abs(p["aggregates"][m]["std"].get<double>() - std::sqrt(var)) <= 1e-12);
        }
        CHECK_FALSE(p.contains("seconds"));
    }
}

TEST_CASE("suite: the characteristics suite has one row per characteristic and algorithm") {
    const auto suite = load_config(std::filesystem::path(CLUSTERLAB_SOURCE_DIR) / "configs/characteristics_suite.json");
    CHECK(suite.pipelines.size() == 18);
    const auto csv = metrics_csv(run_suite(suite));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 19);
    CHECK(csv.find("error") == std::string::npos);
}

TEST_CASE("stability: forced optimum and dbscan both score one") {
    TempDir dir;
    forced_optimum_csv(dir);
    auto p = parse_one(R"({"schema_version":1,"dataset":{"kind":"csv","path":"forced.csv"},
        "clusterer":{"algorithm":"kmeans","k":2,"restarts":1},"runs":20})",
                       dir.path());
    const auto s = stability_run(p);
    CHECK(s.record.std == 0.0);
    CHECK(*s.record.score == 1.0);
    CHECK(s.record.mean == 1.0);
    const auto runs = stability_runs_csv(s);
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 21);

    auto d = parse_one(kMoons);
    d.runs = 5;
    CHECK(*stability_run(d).record.score == 1.0);
    d.runs = 1;
    CHECK_THROWS_AS(stability_run(d), Error);
}

TEST_CASE("cli: exit codes") {
    TempDir dir;
    const std::string out = " --out-dir " + (dir / "out").string() + " ";
    write_text(dir / "ok.json", kMoons);
    CHECK(run_cli(out + "run " + (dir / "ok.json").string()) == 0);
    CHECK(std::filesystem::exists(dir / "out" / "ok.csv"));
    CHECK(run_cli(out + "run " + (dir / "missing.json").string()) == 3);
    write_text(dir / "bad.json", R"({"schema_version":1,"bogus":true})");
    CHECK(run_cli(out + "run " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli(out + "--noise-mode nope run " + (dir / "ok.json").string()) == 2);
    write_text(dir / "partial.json", R"({"schema_version":1,"name":"partial","pipelines":[
        {"dataset":{"kind":"synth","synth":{"kind":"moons","n_samples":100}},"clusterer":{"algorithm":"kmeans"},"runs":1},
        {"dataset":{"kind":"csv","path":"nowhere.csv"},"clusterer":{"algorithm":"kmeans","k":2}}]})");
    CHECK(run_cli(out + "suite " + (dir / "partial.json").string()) == 1);
    CHECK(std::filesystem::exists(dir / "out" / "partial.csv"));
    write_text(dir / "h.idx", "not an idx file");
    CHECK(run_cli("import-idx " + (dir / "h.idx").string() + " " + (dir / "h.idx").string() + " -o " +
                  (dir / "h.csv").string()) == 3);
    CHECK(run_cli("frobnicate") == 2);

    write_text(dir / "spec.json", R"({"kind":"moons","n_samples":50,"seed":1})");
    CHECK(run_cli("synth " + (dir / "spec.json").string() + " -o " + (dir / "m.csv").string()) == 0);
    const auto text = read_file(dir / "m.csv");
    CHECK(text.rfind("f0,f1,label\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 51);
    CHECK(run_cli("eps-plot " + (dir / "ok.json").string() + " -o " + (dir / "k.csv").string()) == 0);
    CHECK(read_file(dir / "k.csv").rfind("rank,distance\n", 0) == 0);
    CHECK(run_cli("embed " + (dir / "ok.json").string() + " -o " + (dir / "e.csv").string()) == 0);
}
