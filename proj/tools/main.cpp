// Command-line front end: discover (CSV -> graph JSON), generate (model spec +
// realization CSVs), bench (experiment config -> metrics JSON + plot CSV), and
// null-table (precomputed GPDC null distributions). Exit codes: 0 ok, 2 bad
// configuration, 3 runtime failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tscausal/baselines.hpp"
#include "tscausal/bench.hpp"
#include "tscausal/dataset.hpp"
#include "tscausal/json_io.hpp"
#include "tscausal/pcmci.hpp"
#include "tscausal/rng.hpp"
#include "tscausal/synthgen.hpp"

namespace {

using namespace tscausal;

double parse_alpha_pc_or_throw(const std::string& s, std::optional<double>& out) {
    if (s == "aic") {
        out.reset();
        return 0.0;
    }
    try {
        out = std::stod(s);
    } catch (const std::exception&) {
        throw config_error("--alpha-pc must be a number or 'aic', got '" + s + "'");
    }
    return *out;
}

int parse_px_or_throw(const std::string& s) {
    if (s == "all") return kUnrestricted;
    try {
        const int v = std::stoi(s);
        if (v < 0) throw config_error("--px must be >= 0 or 'all'");
        return v;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("--px must be an integer or 'all', got '" + s + "'");
    }
}

struct DiscoverOpts {
    std::string input;
    std::string output;
    std::string method = "pcmci";
    std::string test = "parcorr";
    int tau_max = 5;
    std::string alpha_pc = "aic";
    double alpha_mci = 0.05;
    std::string px = "all";
    bool fdr = false;
    bool contemporaneous = false;
    bool prewhiten = false;
    bool timing = false;
    std::uint64_t seed = 0;
    int workers = 1;
    int k_cmi = 50;
    int cmi_b = 500;
    int gpdc_b_null = kDefaultNullTableSize;
    std::string gpdc_null_dir;
};

int run_discover(const DiscoverOpts& o) {
    DiscoveryConfig cfg;
    cfg.tau_max = o.tau_max;
    parse_alpha_pc_or_throw(o.alpha_pc, cfg.alpha_pc);
    // AIC selection is a regression-based rule; permutation tests get a fixed level
    if (!cfg.alpha_pc && o.test != "parcorr") cfg.alpha_pc = 0.2;
    cfg.alpha_mci = o.alpha_mci;
    cfg.p_x = parse_px_or_throw(o.px);
    cfg.fdr = o.fdr;
    cfg.contemporaneous = o.contemporaneous;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    if (o.prewhiten && o.method != "mci0")
        throw config_error("--prewhiten is only meaningful with --method mci0");

    ExperimentConfig carrier;  // holds the test parameters for the factory
    carrier.test = o.test;
    carrier.k_cmi = o.k_cmi;
    carrier.cmi_b = o.cmi_b;
    carrier.gpdc_b_null = o.gpdc_b_null;
    carrier.gpdc_cache_dir = o.gpdc_null_dir;

    const TimeSeriesDataset ds = load_csv(o.input);
    const auto test = make_ci_test(o.test, o.seed, carrier, nullptr);
    const std::string method =
        o.method == "mci0" && o.prewhiten ? "mci0_prewhiten" : o.method;

    const auto t0 = std::chrono::steady_clock::now();
    const TimeSeriesGraph graph = run_method(ds, method, cfg, *test);
    const auto t1 = std::chrono::steady_clock::now();

    ordered_json j = graph_to_json(graph);
    j["runtime_seconds"] = o.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    if (o.output.empty())
        std::cout << j.dump(2) << "\n";
    else
        save_json(j, o.output);
    return 0;
}

struct GenerateOpts {
    int N = 5;
    int L = -1;
    double c = 0.287;
    int T = 150;
    std::uint64_t seed = 0;
    std::string mode = "linear";
    std::string pool = "mixed";
    double obs_noise_sd = 0.0;
    int realizations = 1;
    int transient = 1000;
    std::string out_dir = ".";
};

int run_generate(const GenerateOpts& o) {
    const LinkMode mode = link_mode_from_string(o.mode);
    const AutocorrPool pool = pool_from_string(o.pool);
    const int L = o.L < 0 ? o.N : o.L;
    if (o.realizations < 1) throw config_error("--realizations must be >= 1");
    const SyntheticModelSpec spec =
        draw_model(o.N, L, o.c, mode, pool, o.seed, o.obs_noise_sd);

    namespace fs = std::filesystem;
    fs::create_directories(o.out_dir);
    save_json(spec_to_json(spec), (fs::path(o.out_dir) / "model.json").string());
    for (int r = 0; r < o.realizations; ++r) {
        const std::uint64_t rs = derive_seed(
            o.seed, {static_cast<std::uint64_t>(seed_stream::bench_cell), std::uint64_t(r)});
        const TimeSeriesDataset ds = simulate(spec, o.T, o.transient, rs);
        write_csv(ds, (fs::path(o.out_dir) / ("data_r" + std::to_string(r) + ".csv")).string());
    }
    std::cout << "wrote model.json and " << o.realizations << " realization(s) to " << o.out_dir
              << "\n";
    return 0;
}

struct BenchOpts {
    std::string config;
    std::string out;
    std::string plot_csv;
    std::string graphs_dir;
    int workers = 0;  // 0: keep the config's value
    bool timing = false;
};

int run_bench(const BenchOpts& o) {
    ExperimentConfig cfg = experiment_config_from_json(load_json(o.config));
    if (o.workers > 0) cfg.workers = o.workers;
    if (o.timing) cfg.timing = true;
    if (!o.graphs_dir.empty()) {
        std::filesystem::create_directories(o.graphs_dir);
        cfg.graphs_dir = o.graphs_dir;
    }
    const ExperimentResult res = run_experiment(cfg);
    save_json(metrics_to_json(res), o.out);
    if (!o.plot_csv.empty()) write_plot_csv(res, o.plot_csv);
    std::size_t failures = 0;
    for (const RunRecord& r : res.runs) failures += r.failed ? 1 : 0;
    std::cout << "ran " << res.runs.size() << " method runs over " << res.networks.size()
              << " networks (" << failures << " failures); metrics in " << o.out << "\n";
    return 0;
}

struct NullTableOpts {
    std::vector<int> sample_sizes;
    int b_null = kDefaultNullTableSize;
    std::uint64_t seed = kDefaultNullTableSeed;
    std::string out_dir;
};

int run_null_table(const NullTableOpts& o) {
    for (int n : o.sample_sizes)
        if (n < 10) throw config_error("--n values must be >= 10");
    std::filesystem::create_directories(o.out_dir);
    build_gpdc_null_table(o.sample_sizes, o.b_null, o.seed, o.out_dir);
    for (int n : o.sample_sizes)
        std::cout << "wrote " << gpdc_detail::sidecar_name(n, o.b_null, o.seed) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-series causal discovery: condition selection + momentary CI testing,\n"
                 "baseline methods, a synthetic benchmark generator, and an evaluation harness"};
    app.require_subcommand(1);

    DiscoverOpts d;
    auto* discover = app.add_subcommand("discover", "run a discovery method on a CSV dataset");
    discover->add_option("--input", d.input, "input CSV (header row, one column per variable)")
        ->required();
    discover->add_option("--output", d.output, "graph JSON path (default: stdout)");
    discover->add_option("--method", d.method,
                         "pcmci|fullci|bivci|pairwise|pc|lasso|mci0 (default pcmci)");
    discover->add_option("--test", d.test, "parcorr|gpdc|cmi (default parcorr)");
    discover->add_option("--tau-max", d.tau_max, "maximum lag (default 5)");
    discover->add_option("--alpha-pc", d.alpha_pc,
                         "condition-selection level, a number or 'aic' (default aic)");
    discover->add_option("--alpha-mci", d.alpha_mci, "decision level (default 0.05)");
    discover->add_option("--px", d.px, "source-parent count, an integer or 'all' (default all)");
    discover->add_flag("--fdr", d.fdr, "report q-values and decide by them");
    discover->add_flag("--contemporaneous", d.contemporaneous,
                       "also test undirected lag-0 pairs");
    discover->add_flag("--prewhiten", d.prewhiten, "AR(1) pre-whitening (mci0 only)");
    discover->add_flag("--timing", d.timing, "record wall-clock in the output");
    discover->add_option("--seed", d.seed, "RNG seed (default 0)");
    discover->add_option("--workers", d.workers, "worker threads (default 1)");
    discover->add_option("--k-cmi", d.k_cmi, "CMI nearest-neighbor count (default 50)");
    discover->add_option("--cmi-b", d.cmi_b, "CMI permutation surrogates (default 500)");
    discover->add_option("--gpdc-b-null", d.gpdc_b_null, "GPDC null-table draws (default 1000)");
    discover->add_option("--gpdc-null-dir", d.gpdc_null_dir, "GPDC null-table cache directory");

    GenerateOpts g;
    auto* generate = app.add_subcommand("generate", "draw a random model and simulate it");
    generate->add_option("--N", g.N, "variable count")->required();
    generate->add_option("--L", g.L, "cross-link count (default N)");
    generate->add_option("--c", g.c, "coupling strength (default 0.287)");
    generate->add_option("--T", g.T, "sample length (default 150)");
    generate->add_option("--seed", g.seed, "RNG seed (default 0)");
    generate->add_option("--mode", g.mode, "linear|nonlinear (default linear)");
    generate->add_option("--pool", g.pool, "autocorrelation pool low|high|mixed (default mixed)");
    generate->add_option("--obs-noise-sd", g.obs_noise_sd, "observational noise sd (default 0)");
    generate->add_option("--realizations", g.realizations, "CSV count (default 1)");
    generate->add_option("--transient", g.transient, "burn-in steps (default 1000)");
    generate->add_option("--out-dir", g.out_dir, "output directory (default .)");

    BenchOpts b;
    auto* bench = app.add_subcommand("bench", "run an experiment config to metrics JSON");
    bench->add_option("--config", b.config, "experiment config JSON")->required();
    bench->add_option("--out", b.out, "metrics JSON path")->required();
    bench->add_option("--plot-csv", b.plot_csv, "boxplot-statistics CSV path");
    bench->add_option("--graphs-dir", b.graphs_dir, "store every per-run graph JSON here");
    bench->add_option("--workers", b.workers, "override worker threads");
    bench->add_flag("--timing", b.timing, "record wall-clock per method");

    NullTableOpts t;
    auto* null_table = app.add_subcommand("null-table", "precompute GPDC null distributions");
    null_table->add_option("--n", t.sample_sizes, "sample sizes (repeatable)")->required();
    null_table->add_option("--b-null", t.b_null, "draws per table (default 1000)");
    null_table->add_option("--seed", t.seed, "null-table seed (default 8642)");
    null_table->add_option("--out-dir", t.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (*discover) return run_discover(d);
        if (*generate) return run_generate(g);
        if (*bench) return run_bench(b);
        if (*null_table) return run_null_table(t);
        std::cerr << app.help();
        return 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
