#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "clusterlab/bench/config.hpp"
#include "clusterlab/bench/pipeline.hpp"
#include "clusterlab/bench/report.hpp"
#include "clusterlab/data_io.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/neighbors.hpp"

namespace fs = std::filesystem;
using namespace clab;

namespace {

enum Exit { ok = 0, partial = 1, invalid_config = 2, io_error = 3 };

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> noise_mode;
    std::optional<std::size_t> subsample;
    fs::path out_dir = "results";
    std::size_t jobs = 1;
};

bench::SuiteConfig load(const fs::path& file, const Globals& g) {
    bench::SuiteConfig suite = bench::load_config(file);
    bench::Overrides o;
    o.seed = g.seed;
    o.subsample = g.subsample;
    if (g.noise_mode) {
        auto mode = metrics::parse_noise_mode(*g.noise_mode);
        if (!mode) throw bench::ConfigError("--noise-mode: expected as_cluster or exclude");
        o.noise_mode = *mode;
    }
    bench::apply(suite, o);
    return suite;
}

const bench::PipelineConfig& single(const bench::SuiteConfig& suite) {
    if (suite.pipelines.size() != 1)
        throw bench::ConfigError("expected a single pipeline, found " + std::to_string(suite.pipelines.size()));
    return suite.pipelines.front();
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const fs::path& config, const Globals& g) {
    const auto suite = load(config, g);
    bench::SuiteResult result{suite.name, {{single(suite), bench::run_pipeline(single(suite)), {}}}};
    const auto w = bench::write_suite(result, g.out_dir);
    std::cout << bench::metrics_csv(result) << "wrote " << w.metrics.string() << ", " << w.timing.string() << ", "
              << w.detail.string() << "\n";
    return ok;
}

int cmd_suite(const fs::path& config, const Globals& g) {
    const auto suite = load(config, g);
    const auto result = bench::run_suite(suite, g.jobs);
    const auto w = bench::write_suite(result, g.out_dir);
    for (const auto& e : result.entries)
        std::cout << e.config.name << ": " << (e.artifact ? "ok" : e.error) << "\n";
    std::cout << "wrote " << w.metrics.string() << ", " << w.timing.string() << ", " << w.detail.string() << "\n";
    if (result.failures() > 0) {
        std::cerr << result.failures() << " of " << result.entries.size() << " pipelines failed\n";
        return partial;
    }
    return ok;
}

int cmd_stability(const fs::path& config, const Globals& g) {
    const auto suite = load(config, g);
    const auto& cfg = single(suite);
    const auto r = bench::stability_run(cfg);
    const fs::path runs = g.out_dir / (cfg.name + "_stability_runs.csv");
    const fs::path summary = g.out_dir / (cfg.name + "_stability.csv");
    bench::write_text_file(runs, bench::stability_runs_csv(r));
    bench::write_text_file(summary, bench::stability_summary_csv(r));
    std::cout << bench::stability_summary_csv(r) << "wrote " << runs.string() << ", " << summary.string() << "\n";
    return ok;
}

int cmd_synth(const fs::path& spec_file, const fs::path& out, const Globals& g) {
    auto spec = bench::parse_synth_spec(read_file(spec_file));
    if (g.seed) spec.seed = *g.seed;
    if (g.subsample) spec.n_samples = *g.subsample;
    io::write_csv(out, synth::generate(spec));
    std::cout << "wrote " << out.string() << "\n";
    return ok;
}

int cmd_embed(const fs::path& config, const fs::path& out, const Globals& g) {
    const auto suite = load(config, g);
    const auto prep = bench::prepare(single(suite));
    io::write_matrix_csv(out, prep.embedding.coords, prep.data.labels);
    std::cout << "wrote " << out.string() << " (" << prep.embedding.coords.rows() << " x "
              << prep.embedding.coords.cols() << ")\n";
    return ok;
}

int cmd_eps_plot(const fs::path& config, const fs::path& out, const Globals& g) {
    const auto suite = load(config, g);
    const auto& cfg = single(suite);
    if (cfg.clusterer.min_pts < 2) throw bench::ConfigError("eps-plot: min_pts must be at least 2");
    const auto prep = bench::prepare(cfg);
    const auto profile = neighbors::k_distance_profile(prep.embedding.coords, cfg.clusterer.min_pts - 1);
    std::string text = "rank,distance\n";
    for (std::size_t i = 0; i < profile.size(); ++i) text += std::to_string(i) + "," + io::format_double(profile[i]) + "\n";
    bench::write_text_file(out, text);
    std::cout << "estimated eps " << io::format_double(neighbors::estimate_eps(profile)) << "\nwrote " << out.string() << "\n";
    return ok;
}

int cmd_import(const io::LabeledDataset& ds, const fs::path& out) {
    io::write_csv(out, ds);
    std::cout << ds.size() << " rows, " << ds.data.cols() << " features, " << ds.n_classes() << " classes\nwrote "
              << out.string() << "\n";
    return ok;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return invalid_config;
        case ErrorKind::IoError:
        case ErrorKind::FormatError: return io_error;
        default: return partial;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clusterlab: clustering and dimensionality reduction benchmark"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "override every master seed");
    app.add_option("--out-dir", g.out_dir, "directory for reports")->capture_default_str();
    app.add_option("--noise-mode", g.noise_mode, "as_cluster or exclude");
    app.add_option("--subsample", g.subsample, "override the subsample size");
    app.add_option("--jobs", g.jobs, "pipelines run in parallel by suite")->capture_default_str()->check(CLI::PositiveNumber);

    fs::path config, spec, out, images, labels;
    std::function<int()> action;

    auto* run = app.add_subcommand("run", "run a single pipeline");
    run->add_option("config", config)->required();
    run->callback([&] { action = [&] { return cmd_run(config, g); }; });

    auto* suite = app.add_subcommand("suite", "run every pipeline of a suite");
    suite->add_option("config", config)->required();
    suite->callback([&] { action = [&] { return cmd_suite(config, g); }; });

    auto* stability = app.add_subcommand("stability", "repeated runs and stability score");
    stability->add_option("config", config)->required();
    stability->callback([&] { action = [&] { return cmd_stability(config, g); }; });

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("spec", spec)->required();
    synth->add_option("-o,--output", out)->required();
    synth->callback([&] { action = [&] { return cmd_synth(spec, out, g); }; });

    auto* embed = app.add_subcommand("embed", "write the reduced coordinates of a pipeline");
    embed->add_option("config", config)->required();
    embed->add_option("-o,--output", out)->required();
    embed->callback([&] { action = [&] { return cmd_embed(config, out, g); }; });

    auto* eps_plot = app.add_subcommand("eps-plot", "write the k-distance profile of a pipeline");
    eps_plot->add_option("config", config)->required();
    eps_plot->add_option("-o,--output", out)->required();
    eps_plot->callback([&] { action = [&] { return cmd_eps_plot(config, out, g); }; });

    auto* import_idx = app.add_subcommand("import-idx", "validate IDX image and label files and convert to CSV");
    import_idx->add_option("images", images)->required();
    import_idx->add_option("labels", labels)->required();
    import_idx->add_option("-o,--output", out)->required();
    import_idx->callback([&] {
        action = [&] { return cmd_import(io::load_idx(images, labels, images.stem().string()), out); };
    });

    auto* import_har = app.add_subcommand("import-har", "validate HAR feature and label files and convert to CSV");
    import_har->add_option("features", images)->required();
    import_har->add_option("labels", labels)->required();
    import_har->add_option("-o,--output", out)->required();
    import_har->callback([&] { action = [&] { return cmd_import(io::load_har(images, labels), out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid_config;
    }

    try {
        return action();
    } catch (const bench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return invalid_config;
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io_error;
    }
}
