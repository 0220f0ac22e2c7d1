#pragma once

// Two-stage causal discovery: PC1 condition selection (iteratively tests each
// lagged candidate against the strongest remaining parents, PC-stable removal)
// followed by the momentary-conditional-independence sweep that conditions on
// both the target's and the shifted source's parents. Includes AIC-based
// selection of the PC1 significance level and the q-value adjustment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tscausal/ci_test.hpp"
#include "tscausal/stats.hpp"
#include "tscausal/thread_pool.hpp"

namespace tscausal {

inline constexpr int kUnrestricted = -1;  // sentinel for p_x / p_max

struct DiscoveryConfig {
    int tau_max = 5;
    std::optional<double> alpha_pc;                    // empty -> AIC over alpha_grid
    std::vector<double> alpha_grid = {0.1, 0.2, 0.3, 0.4};
    double alpha_mci = 0.05;
    int p_x = kUnrestricted;                           // max source parents (0 = none)
    int q_max = 1;                                     // subset combinations per candidate
    int p_max = kUnrestricted;                         // max condition dimension
    bool fdr = false;
    bool contemporaneous = false;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct ParentSet {
    int target = 0;
    std::vector<LaggedVariable> parents;  // sorted descending by min_stats
    std::vector<double> min_stats;
};

struct LinkResult {
    int source = 0;
    int lag = 0;
    int target = 0;
    double stat = 0.0;
    double p = 1.0;
    double q = std::numeric_limits<double>::quiet_NaN();
    bool decided = false;
    bool undirected = false;  // contemporaneous pairs carry no orientation
    bool tested = false;      // methods that skip slots (e.g. autodependencies) leave this off
};

struct TimeSeriesGraph {
    int n_vars = 0;
    int tau_max = 0;
    bool contemporaneous = false;
    std::vector<LinkResult> links;  // lagged links (source, lag, target) order, then tau=0 pairs
    std::string method;
    std::string test;

    int lagged_index(int source, int lag, int target) const {
        return (source * tau_max + (lag - 1)) * n_vars + target;
    }
    const LinkResult& at(int source, int lag, int target) const {
        return links[size_t(lagged_index(source, lag, target))];
    }
};

namespace pcmci_detail {

// deterministic order: strongest minimum association first, ties broken by
// (lag, var_index) ascending
inline void sort_by_min_stat(std::vector<LaggedVariable>& parents,
                             const std::map<LaggedVariable, double>& imin) {
    std::stable_sort(parents.begin(), parents.end(), [&](LaggedVariable a, LaggedVariable b) {
        const double ia = imin.at(a), ib = imin.at(b);
        if (ia != ib) return ia > ib;
        if (a.lag != b.lag) return a.lag < b.lag;
        return a.var_index < b.var_index;
    });
}

// lexicographic index combinations of size p over m items; advances in place,
// returns false when exhausted
inline bool next_combination(std::vector<int>& idx, int m) {
    const int p = static_cast<int>(idx.size());
    for (int i = p - 1; i >= 0; --i) {
        if (idx[size_t(i)] < m - (p - i)) {
            ++idx[size_t(i)];
            for (int j = i + 1; j < p; ++j) idx[size_t(j)] = idx[size_t(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace pcmci_detail

// called after every condition-selection test; lets callers aggregate per-link
// p-values without rerunning the sweep
using Pc1Observer =
    std::function<void(LaggedVariable candidate, const std::vector<LaggedVariable>& subset,
                       const CITestOutcome& outcome)>;

// Algorithm: start from all N*tau_max lagged candidates; at dimension p test
// each candidate against q_max lexicographic p-subsets of the other candidates
// (sorted by running minimum |statistic|), mark when any p-value exceeds
// alpha, remove marked candidates only after the full sweep, re-sort, and grow
// p until fewer than p+1 candidates remain.
inline ParentSet pc1_select(const TimeSeriesDataset& ds, int target, const DiscoveryConfig& cfg,
                            const CITest& test, double alpha,
                            const Pc1Observer& observer = {}) {
    if (cfg.tau_max < 1) throw contract_error("pc1_select: tau_max must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw contract_error("pc1_select: alpha outside (0,1]");

    std::vector<LaggedVariable> candidates;
    candidates.reserve(size_t(ds.N()) * size_t(cfg.tau_max));
    for (int lag = 1; lag <= cfg.tau_max; ++lag)
        for (int v = 0; v < ds.N(); ++v) candidates.push_back({v, lag});

    std::map<LaggedVariable, double> imin;
    for (auto c : candidates) imin[c] = std::numeric_limits<double>::infinity();

    const LaggedVariable y{target, 0};
    std::vector<int> comb;
    std::vector<LaggedVariable> subset;

    for (int p = 0;; ++p) {
        if (static_cast<int>(candidates.size()) - 1 < p) break;
        if (cfg.p_max != kUnrestricted && p > cfg.p_max) break;

        std::vector<char> marked(candidates.size(), 0);
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            const LaggedVariable cand = candidates[ci];
            std::vector<LaggedVariable> others;
            others.reserve(candidates.size() - 1);
            for (std::size_t k = 0; k < candidates.size(); ++k)
                if (k != ci) others.push_back(candidates[k]);

            comb.assign(size_t(p), 0);
            for (int k = 0; k < p; ++k) comb[size_t(k)] = k;
            int q = -1;
            while (true) {
                ++q;
                if (q >= cfg.q_max) break;
                subset.clear();
                for (int k : comb) subset.push_back(others[size_t(k)]);
                const CITestOutcome out = test.run(ds, cand, y, subset, cfg.tau_max);
                if (observer) observer(cand, subset, out);
                double& rec = imin[cand];
                rec = std::min(rec, std::fabs(out.statistic));
                if (out.p_value > alpha) {
                    marked[ci] = 1;
                    break;
                }
                if (p == 0) break;  // only the empty subset exists
                if (!pcmci_detail::next_combination(comb, static_cast<int>(others.size()))) break;
            }
        }

        std::vector<LaggedVariable> survivors;
        survivors.reserve(candidates.size());
        for (std::size_t k = 0; k < candidates.size(); ++k)
            if (!marked[k]) survivors.push_back(candidates[k]);
        candidates = std::move(survivors);
        pcmci_detail::sort_by_min_stat(candidates, imin);
    }

    ParentSet out;
    out.target = target;
    out.parents = candidates;
    out.min_stats.reserve(candidates.size());
    for (auto c : candidates) out.min_stats.push_back(imin.at(c));
    return out;
}

// alpha* = argmin over the grid of n*log(RSS) + 2*|parents|, RSS from an
// ordinary regression of the target on the selected parents; ties go to the
// smaller alpha (sparser sets). Defined for the linear (ParCorr) test.
inline std::pair<double, ParentSet> select_alpha_by_aic(const TimeSeriesDataset& ds, int target,
                                                        const std::vector<double>& grid,
                                                        const DiscoveryConfig& cfg,
                                                        const CITest& test) {
    if (grid.empty()) throw contract_error("select_alpha_by_aic: empty grid");
    const int n = ds.T() - cfg.tau_max;
    double best_aic = std::numeric_limits<double>::infinity();
    double best_alpha = grid.front();
    ParentSet best_set;
    bool have = false;
    for (double alpha : grid) {
        ParentSet ps = pc1_select(ds, target, cfg, test, alpha);
        const LaggedVariable y{target, 0};
        LaggedSampleArrays a = build_lagged_arrays(ds, y, y, ps.parents, cfg.tau_max);
        const double rss = ols_residuals(a.z, a.x).squaredNorm();
        const double aic = double(n) * std::log(std::max(rss, 1e-300)) +
                           2.0 * double(ps.parents.size());
        if (!have || aic < best_aic) {
            have = true;
            best_aic = aic;
            best_alpha = alpha;
            best_set = std::move(ps);
        }
    }
    return {best_alpha, std::move(best_set)};
}

namespace pcmci_detail {

// Conditions for the test of (source, lag) -> target: the target's parents
// minus the tested link, plus the first p_x parents of the source shifted by
// lag. Shifted entries falling outside the shared sample window (lag beyond
// tau_max) are dropped so every test in a run sees the same window; this also
// makes alpha_pc=1 with unrestricted p_x coincide exactly with FullCI.
inline std::vector<LaggedVariable> mci_conditions(const ParentSet& target_parents,
                                                  const ParentSet& source_parents,
                                                  LaggedVariable x, int p_x, int tau_max) {
    std::vector<LaggedVariable> z;
    z.reserve(target_parents.parents.size() + source_parents.parents.size());
    for (auto par : target_parents.parents)
        if (!(par == x)) z.push_back(par);
    const int limit = p_x == kUnrestricted ? static_cast<int>(source_parents.parents.size())
                                           : std::min<int>(p_x, int(source_parents.parents.size()));
    for (int k = 0; k < limit; ++k) {
        LaggedVariable shifted = source_parents.parents[size_t(k)];
        shifted.lag += x.lag;
        if (shifted.lag > tau_max) continue;
        if (shifted == x) continue;
        if (std::find(z.begin(), z.end(), shifted) == z.end()) z.push_back(shifted);
    }
    return z;
}

}  // namespace pcmci_detail

inline TimeSeriesGraph mci_sweep(const TimeSeriesDataset& ds,
                                 const std::vector<ParentSet>& parent_sets,
                                 const DiscoveryConfig& cfg, const CITest& test) {
    const int nvars = ds.N();
    if (static_cast<int>(parent_sets.size()) != nvars)
        throw contract_error("mci_sweep: one parent set per variable required");

    TimeSeriesGraph g;
    g.n_vars = nvars;
    g.tau_max = cfg.tau_max;
    g.contemporaneous = cfg.contemporaneous;
    g.test = test.name();

    const int lagged_count = nvars * cfg.tau_max * nvars;
    g.links.resize(size_t(lagged_count));
    std::vector<std::pair<int, int>> pairs;  // contemporaneous (i < j)
    if (cfg.contemporaneous)
        for (int i = 0; i < nvars; ++i)
            for (int j = i + 1; j < nvars; ++j) pairs.emplace_back(i, j);
    g.links.resize(size_t(lagged_count) + pairs.size());

    parallel_for(g.links.size(), cfg.workers, [&](std::size_t idx) {
        LinkResult r;
        LaggedVariable x, y;
        if (idx < size_t(lagged_count)) {
            const int source = int(idx) / (cfg.tau_max * nvars);
            const int rem = int(idx) % (cfg.tau_max * nvars);
            const int lag = rem / nvars + 1;
            const int target = rem % nvars;
            r.source = source;
            r.lag = lag;
            r.target = target;
            x = {source, lag};
            y = {target, 0};
        } else {
            const auto [i, j] = pairs[idx - size_t(lagged_count)];
            r.source = i;
            r.lag = 0;
            r.target = j;
            r.undirected = true;
            x = {i, 0};
            y = {j, 0};
        }
        const auto z = pcmci_detail::mci_conditions(parent_sets[size_t(r.target)],
                                                    parent_sets[size_t(r.source)], x, cfg.p_x,
                                                    cfg.tau_max);
        const CITestOutcome out = test.run(ds, x, y, z, cfg.tau_max);
        r.stat = out.statistic;
        r.p = out.p_value;
        r.decided = out.p_value <= cfg.alpha_mci;
        r.tested = true;
        g.links[idx] = r;
    });
    return g;
}

// q = min(p*m/r, 1) over the m computed tests, ranks by ascending p with ties
// sharing the smallest applicable rank; the decision switches to q <= alpha.
// Slots never tested stay out of m and keep q = NaN.
inline TimeSeriesGraph fdr_adjust(TimeSeriesGraph graph, double alpha_mci) {
    std::vector<std::size_t> order;
    order.reserve(graph.links.size());
    for (std::size_t i = 0; i < graph.links.size(); ++i)
        if (graph.links[i].tested) order.push_back(i);
    const std::size_t m = order.size();
    if (m == 0) return graph;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return graph.links[a].p < graph.links[b].p;
    });
    std::size_t pos = 0;
    while (pos < m) {
        std::size_t end = pos;
        while (end + 1 < m && graph.links[order[end + 1]].p == graph.links[order[pos]].p) ++end;
        const double rank = double(pos + 1);  // smallest applicable rank for the tie group
        for (std::size_t k = pos; k <= end; ++k) {
            LinkResult& l = graph.links[order[k]];
            l.q = std::min(l.p * double(m) / rank, 1.0);
            l.decided = l.q <= alpha_mci;
        }
        pos = end + 1;
    }
    return graph;
}

struct PcmciResult {
    TimeSeriesGraph graph;
    std::vector<ParentSet> parent_sets;
    std::vector<double> alphas;  // per-target PC1 level actually used
};

inline void validate_config(const DiscoveryConfig& cfg, const TimeSeriesDataset& ds) {
    if (cfg.tau_max < 1) throw config_error("tau_max must be >= 1");
    if (ds.T() < 2 * cfg.tau_max + 2)
        throw insufficient_samples_error("T=" + std::to_string(ds.T()) +
                                         " too short for tau_max=" + std::to_string(cfg.tau_max) +
                                         " (need T >= 2*tau_max+2)");
    if (cfg.alpha_pc && !(*cfg.alpha_pc > 0.0 && *cfg.alpha_pc <= 1.0))
        throw config_error("alpha_pc outside (0,1]");
    if (!(cfg.alpha_mci > 0.0 && cfg.alpha_mci < 1.0)) throw config_error("alpha_mci outside (0,1)");
    if (cfg.q_max < 1) throw config_error("q_max must be >= 1");
    if (cfg.p_x < kUnrestricted) throw config_error("p_x must be >= 0 or unrestricted");
    if (cfg.workers < 1) throw config_error("workers must be >= 1");
}

inline PcmciResult run_pcmci(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                             const CITest& test) {
    validate_config(cfg, ds);
    if (!cfg.alpha_pc && test.name() != "parcorr" && test.name() != "oracle")
        throw config_error("AIC alpha selection is defined for the parcorr test; give a fixed "
                           "alpha_pc for " + test.name());
    if (!cfg.alpha_pc && cfg.alpha_grid.empty()) throw config_error("empty alpha grid");

    PcmciResult res;
    res.parent_sets.resize(size_t(ds.N()));
    res.alphas.resize(size_t(ds.N()), 0.0);
    parallel_for(size_t(ds.N()), cfg.workers, [&](std::size_t j) {
        if (cfg.alpha_pc) {
            res.parent_sets[j] = pc1_select(ds, int(j), cfg, test, *cfg.alpha_pc);
            res.alphas[j] = *cfg.alpha_pc;
        } else {
            auto [alpha, ps] = select_alpha_by_aic(ds, int(j), cfg.alpha_grid, cfg, test);
            res.parent_sets[j] = std::move(ps);
            res.alphas[j] = alpha;
        }
    });

    res.graph = mci_sweep(ds, res.parent_sets, cfg, test);
    if (cfg.fdr) res.graph = fdr_adjust(std::move(res.graph), cfg.alpha_mci);
    res.graph.method = "pcmci";
    return res;
}

}  // namespace tscausal
