#pragma once

// Comparison methods emitting the same graph schema as the two-stage
// procedure: conditioning on the entire lagged past (lag-specific Granger),
// conditioning on the target's own past only, unconditional pairwise
// association, plain PC-stable with subset enumeration and max-p aggregation,
// adaptive-lasso regression per target, and the p_x=0 variant with optional
// AR(1) pre-whitening.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tscausal/ci_test.hpp"
#include "tscausal/dataset.hpp"
#include "tscausal/lasso.hpp"
#include "tscausal/pcmci.hpp"
#include "tscausal/stats.hpp"
#include "tscausal/thread_pool.hpp"

namespace tscausal {

// every (variable, lag) regressor up to tau_max, variable-major
inline std::vector<LaggedVariable> all_lagged_regressors(int n_vars, int tau_max) {
    std::vector<LaggedVariable> out;
    out.reserve(size_t(n_vars) * size_t(tau_max));
    for (int v = 0; v < n_vars; ++v)
        for (int lag = 1; lag <= tau_max; ++lag) out.push_back({v, lag});
    return out;
}

namespace baseline_detail {

inline TimeSeriesGraph empty_graph(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                                   const std::string& method, const std::string& test) {
    TimeSeriesGraph g;
    g.n_vars = ds.N();
    g.tau_max = cfg.tau_max;
    g.links.resize(size_t(ds.N()) * size_t(cfg.tau_max) * size_t(ds.N()));
    for (std::size_t idx = 0; idx < g.links.size(); ++idx) {
        const int source = int(idx) / (cfg.tau_max * ds.N());
        const int rem = int(idx) % (cfg.tau_max * ds.N());
        g.links[idx].source = source;
        g.links[idx].lag = rem / ds.N() + 1;
        g.links[idx].target = rem % ds.N();
    }
    g.method = method;
    g.test = test;
    return g;
}

}  // namespace baseline_detail

// One multivariate regression per target on all N*tau_max lagged regressors
// (plus intercept via centering); per-coefficient t statistics, reported as
// the equivalent partial correlation t/sqrt(t^2 + dof) with
// dof = n - N*tau_max - 1.
inline TimeSeriesGraph fullci_regression(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg) {
    validate_config(cfg, ds);
    const int d = ds.N() * cfg.tau_max;
    const int n = ds.T() - cfg.tau_max;
    if (n < d + 2)
        throw dimensionality_error("full conditioning needs N*tau_max + 2 <= n: N*tau_max=" +
                                   std::to_string(d) + ", n=" + std::to_string(n));
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "fullci", "parcorr");
    const auto regressors = all_lagged_regressors(ds.N(), cfg.tau_max);
    const double dof = double(n - d - 1);

    parallel_for(size_t(ds.N()), cfg.workers, [&](std::size_t j) {
        const LaggedVariable y{int(j), 0};
        LaggedSampleArrays a = build_lagged_arrays(ds, y, y, regressors, cfg.tau_max);
        Eigen::MatrixXd zc = a.z.rowwise() - a.z.colwise().mean();
        Eigen::VectorXd yc = a.y.array() - a.y.mean();
        const Eigen::MatrixXd xtx = zc.transpose() * zc;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
        if (ldlt.info() != Eigen::Success)
            throw degenerate_data_error("full conditioning design is singular for target " +
                                        ds.names()[j]);
        const Eigen::VectorXd beta = ldlt.solve(zc.transpose() * yc);
        const double s2 = (yc - zc * beta).squaredNorm() / dof;
        const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
        for (int k = 0; k < d; ++k) {
            const double se = std::sqrt(std::max(s2 * cov(k, k), 0.0));
            const double t = se > 0.0 ? beta[k] / se
                                      : std::numeric_limits<double>::infinity();
            LinkResult& r =
                g.links[size_t(g.lagged_index(regressors[size_t(k)].var_index,
                                              regressors[size_t(k)].lag, int(j)))];
            r.stat = std::isfinite(t) ? t / std::sqrt(t * t + dof) : (t > 0 ? 1.0 : -1.0);
            r.p = student_t_pvalue(t, dof);
            r.decided = r.p <= cfg.alpha_mci;
            r.tested = true;
        }
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

// Route through the given CI test link by link, conditioning on every other
// lagged regressor. For the linear test this agrees with fullci_regression up
// to floating-point error.
inline TimeSeriesGraph fullci_generic(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                                      const CITest& test) {
    validate_config(cfg, ds);
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "fullci", test.name());
    parallel_for(g.links.size(), cfg.workers, [&](std::size_t idx) {
        LinkResult& r = g.links[idx];
        const LaggedVariable x{r.source, r.lag};
        const LaggedVariable y{r.target, 0};
        std::vector<LaggedVariable> z;
        z.reserve(size_t(ds.N() * cfg.tau_max - 1));
        for (int v = 0; v < ds.N(); ++v)
            for (int lag = 1; lag <= cfg.tau_max; ++lag)
                if (!(v == r.source && lag == r.lag)) z.push_back({v, lag});
        const CITestOutcome out = test.run(ds, x, y, z, cfg.tau_max);
        r.stat = out.statistic;
        r.p = out.p_value;
        r.decided = out.p_value <= cfg.alpha_mci;
        r.tested = true;
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

inline TimeSeriesGraph fullci(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                              const CITest& test) {
    if (test.name() == "parcorr") return fullci_regression(ds, cfg);
    return fullci_generic(ds, cfg, test);
}

// Cross-links only, conditioned on the target's own past up to tau_max.
inline TimeSeriesGraph bivci(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                             const CITest& test) {
    validate_config(cfg, ds);
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "bivci", test.name());
    parallel_for(g.links.size(), cfg.workers, [&](std::size_t idx) {
        LinkResult& r = g.links[idx];
        if (r.source == r.target) return;
        const LaggedVariable x{r.source, r.lag};
        const LaggedVariable y{r.target, 0};
        std::vector<LaggedVariable> z;
        z.reserve(size_t(cfg.tau_max));
        for (int lag = 1; lag <= cfg.tau_max; ++lag) z.push_back({r.target, lag});
        const CITestOutcome out = test.run(ds, x, y, z, cfg.tau_max);
        r.stat = out.statistic;
        r.p = out.p_value;
        r.decided = out.p_value <= cfg.alpha_mci;
        r.tested = true;
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

// Unconditional association per lagged cross-pair; the measure is whatever the
// CI test computes with an empty condition set (correlation, distance
// correlation on copula scale, or mutual information).
inline TimeSeriesGraph pairwise(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                                const CITest& test) {
    validate_config(cfg, ds);
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "pairwise", test.name());
    parallel_for(g.links.size(), cfg.workers, [&](std::size_t idx) {
        LinkResult& r = g.links[idx];
        if (r.source == r.target) return;
        const CITestOutcome out =
            test.run(ds, {r.source, r.lag}, {r.target, 0}, {}, cfg.tau_max);
        r.stat = out.statistic;
        r.p = out.p_value;
        r.decided = out.p_value <= cfg.alpha_mci;
        r.tested = true;
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

// Condition selection alone, run with q_max = 10 subsets per candidate and
// dimension. Each link reports the maximum p-value over all tests in which it
// was the tested candidate (including the removing test) and the statistic of
// smallest magnitude; a link is present iff it survived, which coincides with
// max-p <= alpha.
inline TimeSeriesGraph pc_stable_standalone(const TimeSeriesDataset& ds,
                                            const DiscoveryConfig& cfg, const CITest& test) {
    validate_config(cfg, ds);
    DiscoveryConfig c2 = cfg;
    c2.q_max = 10;
    if (!c2.alpha_pc && test.name() != "parcorr" && test.name() != "oracle")
        throw config_error("AIC alpha selection is defined for the parcorr test; give a fixed "
                           "alpha_pc for " + test.name());
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "pc", test.name());

    parallel_for(size_t(ds.N()), cfg.workers, [&](std::size_t j) {
        double alpha;
        if (c2.alpha_pc) {
            alpha = *c2.alpha_pc;
        } else {
            alpha = select_alpha_by_aic(ds, int(j), c2.alpha_grid, c2, test).first;
        }
        struct Track {
            double max_p = 0.0;
            double min_abs = std::numeric_limits<double>::infinity();
            double stat_at_min = 0.0;
        };
        std::map<LaggedVariable, Track> track;
        pc1_select(ds, int(j), c2, test, alpha,
                   [&](LaggedVariable cand, const std::vector<LaggedVariable>&,
                       const CITestOutcome& out) {
                       Track& t = track[cand];
                       t.max_p = std::max(t.max_p, out.p_value);
                       if (std::fabs(out.statistic) < t.min_abs) {
                           t.min_abs = std::fabs(out.statistic);
                           t.stat_at_min = out.statistic;
                       }
                   });
        for (const auto& [cand, t] : track) {
            LinkResult& r = g.links[size_t(g.lagged_index(cand.var_index, cand.lag, int(j)))];
            r.stat = t.stat_at_min;
            r.p = t.max_p;
            r.decided = t.max_p <= alpha;
            r.tested = true;
        }
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

// Per-target adaptive lasso over all lagged regressors on standardized data;
// the reported statistic is the re-weighted coefficient and p-values come from
// the OLS refit (exactly 1 off the active set).
inline TimeSeriesGraph adaptive_lasso(const TimeSeriesDataset& ds_in, const DiscoveryConfig& cfg) {
    validate_config(cfg, ds_in);
    TimeSeriesDataset ds = ds_in;
    ds.standardize();
    TimeSeriesGraph g = baseline_detail::empty_graph(ds, cfg, "lasso", "ols");
    const auto regressors = all_lagged_regressors(ds.N(), cfg.tau_max);

    parallel_for(size_t(ds.N()), cfg.workers, [&](std::size_t j) {
        const LaggedVariable y{int(j), 0};
        LaggedSampleArrays a = build_lagged_arrays(ds, y, y, regressors, cfg.tau_max);
        const LassoResult fit = adaptive_lasso_fit(a.z, a.y);
        for (std::size_t k = 0; k < regressors.size(); ++k) {
            LinkResult& r = g.links[size_t(
                g.lagged_index(regressors[k].var_index, regressors[k].lag, int(j)))];
            r.stat = fit.coefficients[Eigen::Index(k)];
            r.p = fit.p_values[k];
            r.decided = r.p <= cfg.alpha_mci;
            r.tested = true;
        }
    });
    if (cfg.fdr) g = fdr_adjust(std::move(g), cfg.alpha_mci);
    return g;
}

// lag-1 autoregression coefficient estimated as the lag-1 sample correlation
inline double ar1_coefficient(const Eigen::VectorXd& series) {
    const Eigen::Index T = series.size();
    if (T < 3) throw insufficient_samples_error("ar1_coefficient: need at least 3 samples");
    return pearson(series.head(T - 1), series.tail(T - 1));
}

// X~_t = X_t - a^ X_{t-1} per column; output is one sample shorter
inline TimeSeriesDataset prewhiten_dataset(const TimeSeriesDataset& ds) {
    if (ds.T() < 3) throw insufficient_samples_error("prewhitening needs T >= 3");
    Eigen::MatrixXd out(ds.T() - 1, ds.N());
    for (int v = 0; v < ds.N(); ++v) {
        const Eigen::VectorXd col = ds.values().col(v);
        const double a = ar1_coefficient(col);
        out.col(v) = col.tail(ds.T() - 1) - a * col.head(ds.T() - 1);
    }
    return TimeSeriesDataset(std::move(out), ds.names());
}

// Momentary test with no source-side conditions (p_x = 0); optionally removes
// the AR(1) part of every series first.
inline PcmciResult mci0_and_prewhiten(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg,
                                      const CITest& test, bool prewhiten) {
    DiscoveryConfig c2 = cfg;
    c2.p_x = 0;
    PcmciResult res = prewhiten ? run_pcmci(prewhiten_dataset(ds), c2, test)
                                : run_pcmci(ds, c2, test);
    res.graph.method = prewhiten ? "mci0_prewhiten" : "mci0";
    return res;
}

}  // namespace tscausal
