#pragma once

// Experiment harness: draw random networks, simulate realization ensembles,
// run every configured method on the same realizations, score cross-links
// against the ground truth, and aggregate per-link detection rates into
// autocorrelation-class-split distribution summaries plus a plot-ready CSV.
// Per-cell seeds make the output independent of scheduling.

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tscausal/baselines.hpp"
#include "tscausal/cmi.hpp"
#include "tscausal/gpdc.hpp"
#include "tscausal/json_io.hpp"
#include "tscausal/parcorr.hpp"
#include "tscausal/pcmci.hpp"
#include "tscausal/rng.hpp"
#include "tscausal/synthgen.hpp"
#include "tscausal/thread_pool.hpp"

namespace tscausal {

struct ExperimentConfig {
    std::vector<std::string> methods = {"pcmci"};
    std::string test = "parcorr";
    std::vector<int> n_values = {5};
    int links = -1;  // -1: one link per variable (L = N)
    double coupling = 0.287;
    LinkMode mode = LinkMode::linear;
    AutocorrPool pool = AutocorrPool::mixed;
    double obs_noise_sd = 0.0;
    int networks = 5;
    int realizations = 50;
    int T = 150;
    int tau_max = 5;
    std::optional<double> alpha_pc;  // empty: AIC for parcorr, 0.2 otherwise
    double alpha_mci = 0.05;
    int p_x = kUnrestricted;
    bool fdr = false;
    bool contemporaneous = false;
    int k_cmi = 50;
    int cmi_b = 500;
    int gpdc_b_null = kDefaultNullTableSize;
    std::string gpdc_cache_dir;
    std::uint64_t seed = 0;
    int workers = 1;
    bool timing = false;     // wall-clock fields stay 0 unless enabled
    std::string graphs_dir;  // when set, store every per-run graph JSON here
    std::map<std::string, ordered_json> method_overrides;
};

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"pcmci", "fullci",        "bivci",
                                               "pairwise", "pc",         "lasso",
                                               "mci0",     "mci0_prewhiten"};
    return m;
}

inline void validate_experiment_config(const ExperimentConfig& c) {
    if (c.methods.empty()) throw config_error("experiment: methods must be nonempty");
    for (const auto& m : c.methods) {
        const auto& known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw config_error("experiment: unknown method '" + m + "'");
    }
    if (c.test != "parcorr" && c.test != "gpdc" && c.test != "cmi")
        throw config_error("experiment: unknown test '" + c.test + "'");
    if (c.n_values.empty()) throw config_error("experiment: N list must be nonempty");
    for (int n : c.n_values)
        if (n < 2) throw config_error("experiment: N must be >= 2");
    if (c.networks < 1) throw config_error("experiment: networks must be >= 1");
    if (c.realizations < 1) throw config_error("experiment: realizations must be >= 1");
    if (c.tau_max < 1) throw config_error("experiment: tau_max must be >= 1");
    if (c.T < 2 * c.tau_max + 2) throw config_error("experiment: T too short for tau_max");
    if (c.workers < 1) throw config_error("experiment: workers must be >= 1");
}

// the per-method view of the shared discovery settings, with optional JSON
// patches ({"alpha_pc": 0.1 | "aic", "alpha_mci": .., "px": int | "all",
// "fdr": bool}) applied on top
inline DiscoveryConfig discovery_config_for(const ExperimentConfig& c, const std::string& method) {
    DiscoveryConfig d;
    d.tau_max = c.tau_max;
    d.alpha_pc = c.alpha_pc;
    if (!d.alpha_pc && c.test != "parcorr") d.alpha_pc = 0.2;
    d.alpha_mci = c.alpha_mci;
    d.p_x = c.p_x;
    d.fdr = c.fdr;
    d.contemporaneous = c.contemporaneous;
    d.workers = 1;  // the harness parallelizes over cells instead
    auto it = c.method_overrides.find(method);
    if (it != c.method_overrides.end()) {
        const ordered_json& o = it->second;
        try {
            if (o.contains("alpha_pc")) {
                if (o["alpha_pc"].is_string()) {
                    if (o["alpha_pc"].get<std::string>() != "aic")
                        throw config_error("experiment: alpha_pc override must be a number or \"aic\"");
                    d.alpha_pc.reset();
                } else {
                    d.alpha_pc = o["alpha_pc"].get<double>();
                }
            }
            if (o.contains("alpha_mci")) d.alpha_mci = o["alpha_mci"].get<double>();
            if (o.contains("px")) {
                if (o["px"].is_string()) {
                    if (o["px"].get<std::string>() != "all")
                        throw config_error("experiment: px override must be an integer or \"all\"");
                    d.p_x = kUnrestricted;
                } else {
                    d.p_x = o["px"].get<int>();
                }
            }
            if (o.contains("fdr")) d.fdr = o["fdr"].get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw config_error("experiment: bad override for '" + method + "': " + e.what());
        }
    }
    return d;
}

inline std::unique_ptr<CITest> make_ci_test(const std::string& test, std::uint64_t seed,
                                            const ExperimentConfig& c,
                                            std::shared_ptr<GpdcNullTable> gpdc_table) {
    if (test == "parcorr") return std::make_unique<ParCorrTest>();
    if (test == "gpdc") {
        if (!gpdc_table) gpdc_table = std::make_shared<GpdcNullTable>(c.gpdc_b_null,
                                                                      kDefaultNullTableSeed,
                                                                      c.gpdc_cache_dir);
        return std::make_unique<GpdcTest>(std::move(gpdc_table));
    }
    if (test == "cmi") {
        CmiTestConfig cc;
        cc.k_cmi = c.k_cmi;
        cc.B = c.cmi_b;
        cc.rng_seed = seed;
        return std::make_unique<CmiTest>(cc);
    }
    throw config_error("unknown test '" + test + "'");
}

inline TimeSeriesGraph run_method(const TimeSeriesDataset& ds, const std::string& method,
                                  const DiscoveryConfig& cfg, const CITest& test) {
    if (method == "pcmci") return run_pcmci(ds, cfg, test).graph;
    if (method == "fullci") return fullci(ds, cfg, test);
    if (method == "bivci") return bivci(ds, cfg, test);
    if (method == "pairwise") return pairwise(ds, cfg, test);
    if (method == "pc") return pc_stable_standalone(ds, cfg, test);
    if (method == "lasso") return adaptive_lasso(ds, cfg);
    if (method == "mci0") return mci0_and_prewhiten(ds, cfg, test, false).graph;
    if (method == "mci0_prewhiten") return mci0_and_prewhiten(ds, cfg, test, true).graph;
    throw config_error("unknown method '" + method + "'");
}

struct LinkScore {
    int source = 0;
    int lag = 0;
    int target = 0;
    bool predicted = false;
    bool actual = false;
    bool tested = false;
    double stat = 0.0;
};

// cross-link slots only; a slot the method never tested counts as a negative
// prediction
inline std::vector<LinkScore> score_against_truth(const TimeSeriesGraph& g,
                                                  const GroundTruthGraph& truth) {
    if (g.n_vars != truth.n_vars)
        throw contract_error("score_against_truth: variable count mismatch");
    std::vector<LinkScore> out;
    out.reserve(size_t(g.n_vars) * size_t(g.n_vars - 1) * size_t(g.tau_max));
    for (int i = 0; i < g.n_vars; ++i)
        for (int lag = 1; lag <= g.tau_max; ++lag)
            for (int j = 0; j < g.n_vars; ++j) {
                if (i == j) continue;
                const LinkResult& l = g.at(i, lag, j);
                out.push_back({i, lag, j, l.tested && l.decided, truth.has(i, lag, j),
                               l.tested, l.stat});
            }
    return out;
}

struct RunRecord {
    int n_value = 0;
    int net = 0;
    int realization = 0;
    std::string method;
    bool failed = false;
    std::string error;
    double seconds = 0.0;
    std::vector<LinkScore> cross;
};

struct NetworkInfo {
    int n_value = 0;
    int net = 0;
    SyntheticModelSpec spec;
    GroundTruthGraph truth;
    std::vector<double> mean_ar1;  // per variable, averaged over realizations
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<NetworkInfo> networks;
    std::vector<RunRecord> runs;  // (N, net, realization) cell-major, methods inner
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_experiment_config(cfg);
    std::shared_ptr<GpdcNullTable> gpdc_table;
    if (cfg.test == "gpdc")
        gpdc_table = std::make_shared<GpdcNullTable>(cfg.gpdc_b_null, kDefaultNullTableSeed,
                                                     cfg.gpdc_cache_dir);

    ExperimentResult res;
    res.config = cfg;

    // networks: the mixed pool alternates with the parity of the model seed,
    // so force that parity to follow the network index
    for (int n : cfg.n_values) {
        for (int net = 0; net < cfg.networks; ++net) {
            std::uint64_t mseed =
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(seed_stream::model_draw),
                                       std::uint64_t(n), std::uint64_t(net)});
            mseed = (mseed & ~std::uint64_t(1)) | std::uint64_t(net & 1);
            NetworkInfo info;
            info.n_value = n;
            info.net = net;
            const int L = cfg.links < 0 ? n : cfg.links;
            info.spec = draw_model(n, L, cfg.coupling, cfg.mode, cfg.pool, mseed,
                                   cfg.obs_noise_sd);
            info.truth = export_ground_truth(info.spec);
            res.networks.push_back(std::move(info));
        }
    }

    struct Cell {
        std::size_t network_index;
        int realization;
    };
    std::vector<Cell> cells;
    cells.reserve(res.networks.size() * size_t(cfg.realizations));
    for (std::size_t ni = 0; ni < res.networks.size(); ++ni)
        for (int r = 0; r < cfg.realizations; ++r) cells.push_back({ni, r});

    const std::size_t n_methods = cfg.methods.size();
    std::vector<RunRecord> all_runs(cells.size() * n_methods);
    std::vector<std::vector<double>> cell_ar1(cells.size());

    parallel_for(cells.size(), cfg.workers, [&](std::size_t ci) {
        const Cell cell = cells[ci];
        const NetworkInfo& info = res.networks[cell.network_index];
        const std::uint64_t cell_seed =
            derive_seed(cfg.seed, {static_cast<std::uint64_t>(seed_stream::bench_cell),
                                   std::uint64_t(info.n_value), std::uint64_t(info.net),
                                   std::uint64_t(cell.realization)});
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            RunRecord& rec = all_runs[ci * n_methods + mi];
            rec.n_value = info.n_value;
            rec.net = info.net;
            rec.realization = cell.realization;
            rec.method = cfg.methods[mi];
        }
        std::optional<TimeSeriesDataset> ds;
        try {
            ds = simulate(info.spec, cfg.T, 1000, cell_seed);
            ds->standardize();
        } catch (const std::exception& e) {
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                all_runs[ci * n_methods + mi].failed = true;
                all_runs[ci * n_methods + mi].error = e.what();
            }
            return;
        }
        std::vector<double> ar1(static_cast<size_t>(info.n_value));
        for (int v = 0; v < info.n_value; ++v)
            ar1[size_t(v)] = ar1_coefficient(ds->values().col(v));
        cell_ar1[ci] = std::move(ar1);

        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            RunRecord& rec = all_runs[ci * n_methods + mi];
            try {
                DiscoveryConfig dc = discovery_config_for(cfg, rec.method);
                dc.seed = cell_seed;
                const auto test = make_ci_test(cfg.test, cell_seed, cfg, gpdc_table);
                const auto t0 = std::chrono::steady_clock::now();
                const TimeSeriesGraph graph = run_method(*ds, rec.method, dc, *test);
                const auto t1 = std::chrono::steady_clock::now();
                if (cfg.timing)
                    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
                rec.cross = score_against_truth(graph, info.truth);
                if (!cfg.graphs_dir.empty()) {
                    const std::string path = cfg.graphs_dir + "/graph_N" +
                                             std::to_string(rec.n_value) + "_net" +
                                             std::to_string(rec.net) + "_r" +
                                             std::to_string(rec.realization) + "_" + rec.method +
                                             ".json";
                    save_json(graph_to_json(graph), path);
                }
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
            }
        }
    });

    // realization-mean lag-1 autocorrelation per variable and network
    for (std::size_t ni = 0; ni < res.networks.size(); ++ni) {
        NetworkInfo& info = res.networks[ni];
        info.mean_ar1.assign(size_t(info.n_value), 0.0);
        int count = 0;
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            if (cells[ci].network_index != ni || cell_ar1[ci].empty()) continue;
            for (int v = 0; v < info.n_value; ++v) info.mean_ar1[size_t(v)] += cell_ar1[ci][size_t(v)];
            ++count;
        }
        if (count > 0)
            for (double& a : info.mean_ar1) a /= double(count);
    }
    res.runs = std::move(all_runs);
    return res;
}

inline ordered_json experiment_config_to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["methods"] = c.methods;
    j["test"] = c.test;
    j["N"] = c.n_values;
    j["L"] = c.links;
    j["c"] = c.coupling;
    j["mode"] = to_string(c.mode);
    j["pool"] = to_string(c.pool);
    j["obs_noise_sd"] = c.obs_noise_sd;
    j["networks"] = c.networks;
    j["realizations"] = c.realizations;
    j["T"] = c.T;
    j["tau_max"] = c.tau_max;
    if (c.alpha_pc)
        j["alpha_pc"] = *c.alpha_pc;
    else
        j["alpha_pc"] = "aic";
    j["alpha_mci"] = c.alpha_mci;
    if (c.p_x == kUnrestricted)
        j["px"] = "all";
    else
        j["px"] = c.p_x;
    j["fdr"] = c.fdr;
    j["contemporaneous"] = c.contemporaneous;
    j["k_cmi"] = c.k_cmi;
    j["cmi_b"] = c.cmi_b;
    j["gpdc_b_null"] = c.gpdc_b_null;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["timing"] = c.timing;
    if (!c.method_overrides.empty()) {
        ordered_json o;
        for (const auto& [k, v] : c.method_overrides) o[k] = v;
        j["overrides"] = std::move(o);
    }
    return j;
}

inline ExperimentConfig experiment_config_from_json(const ordered_json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
        if (j.contains("test")) c.test = j["test"].get<std::string>();
        if (j.contains("N")) {
            if (j["N"].is_array())
                c.n_values = j["N"].get<std::vector<int>>();
            else
                c.n_values = {j["N"].get<int>()};
        }
        if (j.contains("L")) c.links = j["L"].get<int>();
        if (j.contains("c")) c.coupling = j["c"].get<double>();
        if (j.contains("mode")) c.mode = link_mode_from_string(j["mode"].get<std::string>());
        if (j.contains("pool")) c.pool = pool_from_string(j["pool"].get<std::string>());
        if (j.contains("obs_noise_sd")) c.obs_noise_sd = j["obs_noise_sd"].get<double>();
        if (j.contains("networks")) c.networks = j["networks"].get<int>();
        if (j.contains("realizations")) c.realizations = j["realizations"].get<int>();
        if (j.contains("T")) c.T = j["T"].get<int>();
        if (j.contains("tau_max")) c.tau_max = j["tau_max"].get<int>();
        if (j.contains("alpha_pc")) {
            if (j["alpha_pc"].is_string()) {
                if (j["alpha_pc"].get<std::string>() != "aic")
                    throw config_error("experiment: alpha_pc must be a number or \"aic\"");
                c.alpha_pc.reset();
            } else {
                c.alpha_pc = j["alpha_pc"].get<double>();
            }
        }
        if (j.contains("alpha_mci")) c.alpha_mci = j["alpha_mci"].get<double>();
        if (j.contains("px")) {
            if (j["px"].is_string()) {
                if (j["px"].get<std::string>() != "all")
                    throw config_error("experiment: px must be an integer or \"all\"");
                c.p_x = kUnrestricted;
            } else {
                c.p_x = j["px"].get<int>();
            }
        }
        if (j.contains("fdr")) c.fdr = j["fdr"].get<bool>();
        if (j.contains("contemporaneous")) c.contemporaneous = j["contemporaneous"].get<bool>();
        if (j.contains("k_cmi")) c.k_cmi = j["k_cmi"].get<int>();
        if (j.contains("cmi_b")) c.cmi_b = j["cmi_b"].get<int>();
        if (j.contains("gpdc_b_null")) c.gpdc_b_null = j["gpdc_b_null"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("workers")) c.workers = j["workers"].get<int>();
        if (j.contains("timing")) c.timing = j["timing"].get<bool>();
        if (j.contains("overrides"))
            for (const auto& [k, v] : j["overrides"].items()) c.method_overrides[k] = v;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("experiment config: ") + e.what());
    }
    validate_experiment_config(c);
    return c;
}

namespace bench_detail {

struct SlotAgg {
    int detections = 0;
    int successes = 0;
    double stat_sum = 0.0;
    bool actual = false;
};

struct SummaryStats {
    double q01 = 0, q25 = 0, q50 = 0, q75 = 0, q99 = 0, mean = 0;
    int count = 0;
};

inline SummaryStats summarize(const std::vector<double>& v) {
    SummaryStats s;
    s.count = int(v.size());
    if (v.empty()) return s;
    s.q01 = quantile(v, 0.01);
    s.q25 = quantile(v, 0.25);
    s.q50 = quantile(v, 0.50);
    s.q75 = quantile(v, 0.75);
    s.q99 = quantile(v, 0.99);
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / double(v.size());
    return s;
}

inline ordered_json stats_to_json(const SummaryStats& s) {
    ordered_json j;
    j["q01"] = s.q01;
    j["q25"] = s.q25;
    j["q50"] = s.q50;
    j["q75"] = s.q75;
    j["q99"] = s.q99;
    j["mean"] = s.mean;
    j["count"] = s.count;
    return j;
}

// key: (method, N, net, source, lag, target)
using SlotKey = std::tuple<std::string, int, int, int, int, int>;

inline std::map<SlotKey, SlotAgg> aggregate_slots(const ExperimentResult& res) {
    std::map<SlotKey, SlotAgg> agg;
    for (const RunRecord& r : res.runs) {
        if (r.failed) continue;
        for (const LinkScore& s : r.cross) {
            SlotAgg& a = agg[{r.method, r.n_value, r.net, s.source, s.lag, s.target}];
            a.successes += 1;
            a.detections += s.predicted ? 1 : 0;
            a.stat_sum += s.stat;
            a.actual = s.actual;
        }
    }
    return agg;
}

inline const NetworkInfo& network_of(const ExperimentResult& res, int n_value, int net) {
    for (const NetworkInfo& info : res.networks)
        if (info.n_value == n_value && info.net == net) return info;
    throw contract_error("metrics: network lookup failed");
}

inline std::string pair_class(const NetworkInfo& info, int source, int target) {
    const double a = 0.5 * (info.mean_ar1[size_t(source)] + info.mean_ar1[size_t(target)]);
    return a > 0.7 ? "strong" : "weak";
}

}  // namespace bench_detail

inline ordered_json metrics_to_json(const ExperimentResult& res) {
    using namespace bench_detail;
    ordered_json j;
    j["config"] = experiment_config_to_json(res.config);

    const auto agg = aggregate_slots(res);
    ordered_json per_link = ordered_json::array();
    // method -> class -> measure -> rates
    std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>> pools;
    for (const auto& [key, a] : agg) {
        const auto& [method, n_value, net, source, lag, target] = key;
        if (a.successes == 0) continue;
        const NetworkInfo& info = network_of(res, n_value, net);
        const std::string cls = pair_class(info, source, target);
        const double rate = double(a.detections) / double(a.successes);
        ordered_json row;
        row["method"] = method;
        row["N"] = n_value;
        row["net"] = net;
        row["i"] = source;
        row["tau"] = lag;
        row["j"] = target;
        row[a.actual ? "tpr" : "fpr"] = rate;
        row["mean_stat"] = a.stat_sum / double(a.successes);
        row["autocorr_class"] = cls;
        per_link.push_back(std::move(row));
        pools[method][cls][a.actual ? "tpr" : "fpr"].push_back(rate);
    }
    j["per_link"] = std::move(per_link);

    ordered_json summaries = ordered_json::object();
    for (const std::string& method : res.config.methods) {
        if (!pools.count(method)) continue;
        ordered_json per_class;
        for (const std::string& cls : {"weak", "strong"}) {
            auto it = pools[method].find(cls);
            if (it == pools[method].end()) continue;
            ordered_json per_measure;
            for (const std::string& measure : {"fpr", "tpr"}) {
                auto mit = it->second.find(measure);
                if (mit == it->second.end()) continue;
                per_measure[measure] = stats_to_json(summarize(mit->second));
            }
            per_class[cls] = std::move(per_measure);
        }
        summaries[method] = std::move(per_class);
    }
    j["summaries"] = std::move(summaries);

    ordered_json runtimes;
    for (const std::string& method : res.config.methods) {
        std::vector<double> secs;
        for (const RunRecord& r : res.runs)
            if (r.method == method && !r.failed) secs.push_back(r.seconds);
        ordered_json rt;
        double mean = 0.0, sd = 0.0;
        if (!secs.empty()) {
            for (double s : secs) mean += s;
            mean /= double(secs.size());
            for (double s : secs) sd += (s - mean) * (s - mean);
            sd = secs.size() > 1 ? std::sqrt(sd / double(secs.size() - 1)) : 0.0;
        }
        rt["mean_seconds"] = mean;
        rt["sd_seconds"] = sd;
        rt["runs"] = secs.size();
        runtimes[method] = std::move(rt);
    }
    j["runtimes"] = std::move(runtimes);

    ordered_json failures;
    ordered_json cells = ordered_json::array();
    for (const RunRecord& r : res.runs) {
        if (!r.failed) continue;
        ordered_json f;
        f["method"] = r.method;
        f["N"] = r.n_value;
        f["net"] = r.net;
        f["realization"] = r.realization;
        f["error"] = r.error;
        cells.push_back(std::move(f));
    }
    failures["count"] = cells.size();
    failures["cells"] = std::move(cells);
    j["failures"] = std::move(failures);
    return j;
}

// one row per (method, N, class, measure, statistic); values are the same
// boxplot numbers as in the metrics JSON but split by N
inline void write_plot_csv(const ExperimentResult& res, const std::string& path) {
    using namespace bench_detail;
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "method,N,autocorr_class,measure,stat,value\n";
    const auto agg = aggregate_slots(res);
    std::map<std::tuple<std::string, int, std::string, std::string>, std::vector<double>> groups;
    for (const auto& [key, a] : agg) {
        const auto& [method, n_value, net, source, lag, target] = key;
        if (a.successes == 0) continue;
        const NetworkInfo& info = network_of(res, n_value, net);
        const std::string cls = pair_class(info, source, target);
        groups[{method, n_value, cls, a.actual ? "tpr" : "fpr"}].push_back(
            double(a.detections) / double(a.successes));
    }
    for (const std::string& method : res.config.methods) {
        for (int n : res.config.n_values) {
            for (const std::string& cls : {"weak", "strong"}) {
                for (const std::string& measure : {"fpr", "tpr"}) {
                    auto it = groups.find({method, n, cls, measure});
                    if (it == groups.end()) continue;
                    const SummaryStats s = summarize(it->second);
                    const std::pair<const char*, double> rows[] = {
                        {"q01", s.q01}, {"q25", s.q25}, {"q50", s.q50},
                        {"q75", s.q75}, {"q99", s.q99}, {"mean", s.mean}};
                    for (const auto& [name, value] : rows)
                        out << method << ',' << n << ',' << cls << ',' << measure << ',' << name
                            << ',' << detail::format_double(value) << "\n";
                }
            }
        }
    }
    if (!out) throw io_error("write failure on '" + path + "'");
}

}  // namespace tscausal
