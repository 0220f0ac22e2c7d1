#pragma once

// Random stationary lagged structural models and their simulation: X_t^j =
// a_j X_{t-1}^j + c * sum_i f_i(X_{t-tau_i}^i) + eta_t^j with unit Gaussian
// innovations, link functions drawn linear or nonlinear, and rejection
// sampling against a companion-matrix stationarity screen.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tscausal/dataset.hpp"
#include "tscausal/errors.hpp"
#include "tscausal/rng.hpp"

namespace tscausal {

enum class LinkFunc { f1 = 1, f2 = 2, f3 = 3 };

// f1 is the identity; f2 and f3 bend near the origin and straighten out for
// large |x| (the exponential corrections vanish)
inline double eval_link_func(LinkFunc f, double x) {
    switch (f) {
        case LinkFunc::f1:
            return x;
        case LinkFunc::f2:
            return (1.0 - 4.0 * std::exp(-x * x / 2.0)) * x;
        case LinkFunc::f3:
            return (1.0 - 4.0 * x * x * x * std::exp(-x * x / 2.0)) * x;
    }
    throw contract_error("eval_link_func: unknown function tag");
}

struct ModelLink {
    int i = 0;    // source variable
    int j = 0;    // target variable
    int tau = 1;  // lag, 1 or 2
    double coeff = 0.0;
    LinkFunc func = LinkFunc::f1;
};

struct SyntheticModelSpec {
    int n_vars = 0;
    int n_links = 0;
    std::vector<ModelLink> links;
    std::vector<double> autos;
    double obs_noise_sd = 0.0;
    std::uint64_t seed = 0;
};

enum class LinkMode { linear, nonlinear };
enum class AutocorrPool { low, high, mixed };

inline LinkMode link_mode_from_string(const std::string& s) {
    if (s == "linear") return LinkMode::linear;
    if (s == "nonlinear") return LinkMode::nonlinear;
    throw config_error("unknown link mode '" + s + "' (linear|nonlinear)");
}

inline AutocorrPool pool_from_string(const std::string& s) {
    if (s == "low") return AutocorrPool::low;
    if (s == "high") return AutocorrPool::high;
    if (s == "mixed") return AutocorrPool::mixed;
    throw config_error("unknown autocorrelation pool '" + s + "' (low|high|mixed)");
}

inline std::string to_string(LinkMode m) {
    return m == LinkMode::linear ? "linear" : "nonlinear";
}

inline std::string to_string(AutocorrPool p) {
    switch (p) {
        case AutocorrPool::low: return "low";
        case AutocorrPool::high: return "high";
        default: return "mixed";
    }
}

// mixed mode alternates pools across networks by seed parity
inline const std::vector<double>& autocorr_pool_values(AutocorrPool pool, std::uint64_t seed) {
    static const std::vector<double> low = {0.0, 0.2, 0.4, 0.6, 0.8, 0.9};
    static const std::vector<double> high = {0.6, 0.8, 0.9, 0.95};
    if (pool == AutocorrPool::low) return low;
    if (pool == AutocorrPool::high) return high;
    return seed % 2 == 0 ? low : high;
}

// Linearize (f2, f3 act as the identity), stack lags 1 and 2 into the 2N x 2N
// companion matrix, and require spectral radius < 1 - 1e-6.
inline bool check_stationarity(const SyntheticModelSpec& spec) {
    const int N = spec.n_vars;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    for (int j = 0; j < N; ++j) companion(j, j) += spec.autos[size_t(j)];
    for (const ModelLink& l : spec.links) {
        if (l.tau == 1)
            companion(l.j, l.i) += l.coeff;
        else
            companion(l.j, N + l.i) += l.coeff;
    }
    companion.block(N, 0, N, N).setIdentity();
    const Eigen::VectorXcd ev = companion.eigenvalues();
    double radius = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) radius = std::max(radius, std::abs(ev[k]));
    return radius < 1.0 - 1e-6;
}

// Rejection-sample up to 1000 attempts: draw autocoefficients from the pool,
// L distinct (source, target, lag) slots, per-link sign and function, and keep
// the first draw passing the stationarity screen.
inline SyntheticModelSpec draw_model(int N, int L, double c, LinkMode mode, AutocorrPool pool,
                                     std::uint64_t seed, double obs_noise_sd = 0.0) {
    if (N < 1) throw config_error("draw_model: N must be >= 1");
    if (L < 0) throw config_error("draw_model: L must be >= 0");
    const int n_slots = 2 * N * (N - 1);
    if (L > n_slots)
        throw config_error("draw_model: L=" + std::to_string(L) + " exceeds the " +
                           std::to_string(n_slots) + " distinct (source, target, lag) slots");
    if (!(obs_noise_sd >= 0.0)) throw config_error("draw_model: obs_noise_sd must be >= 0");

    const std::vector<double>& apool = autocorr_pool_values(pool, seed);
    std::vector<std::array<int, 3>> slots;  // (i, j, tau), i != j
    slots.reserve(size_t(n_slots));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j)
                for (int tau = 1; tau <= 2; ++tau) slots.push_back({i, j, tau});

    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        auto eng = make_engine(
            derive_seed(seed, {static_cast<std::uint64_t>(seed_stream::model_draw), attempt}));
        SyntheticModelSpec spec;
        spec.n_vars = N;
        spec.n_links = L;
        spec.obs_noise_sd = obs_noise_sd;
        spec.seed = seed;

        std::uniform_int_distribution<std::size_t> apick(0, apool.size() - 1);
        spec.autos.reserve(size_t(N));
        for (int j = 0; j < N; ++j) spec.autos.push_back(apool[apick(eng)]);

        // partial Fisher-Yates for L slots without replacement
        std::vector<std::size_t> order(slots.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 0; k < L; ++k) {
            std::uniform_int_distribution<std::size_t> pick(size_t(k), order.size() - 1);
            std::swap(order[size_t(k)], order[pick(eng)]);
            const auto [i, j, tau] = slots[order[size_t(k)]];
            ModelLink link;
            link.i = i;
            link.j = j;
            link.tau = tau;
            link.coeff = unit(eng) < 0.5 ? c : -c;
            if (mode == LinkMode::linear) {
                link.func = LinkFunc::f1;
            } else {
                const double u = unit(eng);
                link.func = u < 0.5 ? LinkFunc::f1 : (u < 0.75 ? LinkFunc::f2 : LinkFunc::f3);
            }
            spec.links.push_back(link);
        }
        if (check_stationarity(spec)) return spec;
    }
    throw unsatisfiable_config_error("no stationary model found in 1000 attempts (N=" +
                                     std::to_string(N) + ", L=" + std::to_string(L) +
                                     ", c=" + std::to_string(c) + ")");
}

// Iterate the structural equations from zero initial history, drop the
// transient, optionally add observational noise. A separate seed lets one
// model spec drive many realizations.
inline TimeSeriesDataset simulate(const SyntheticModelSpec& spec, int T, int transient = 1000,
                                  std::optional<std::uint64_t> seed = std::nullopt) {
    if (T < 10) throw contract_error("simulate: T must be >= 10");
    if (transient < 100) throw contract_error("simulate: transient must be >= 100");
    const int N = spec.n_vars;
    const std::uint64_t s = seed.value_or(spec.seed);
    auto eng = make_engine(derive_seed(s, {static_cast<std::uint64_t>(seed_stream::simulate)}));
    std::normal_distribution<double> unit(0.0, 1.0);

    const int total = T + transient;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, N);
    auto past = [&](int t, int var) { return t < 0 ? 0.0 : x(t, var); };
    for (int t = 0; t < total; ++t) {
        for (int j = 0; j < N; ++j) x(t, j) = spec.autos[size_t(j)] * past(t - 1, j) + unit(eng);
        for (const ModelLink& l : spec.links)
            x(t, l.j) += l.coeff * eval_link_func(l.func, past(t - l.tau, l.i));
        for (int j = 0; j < N; ++j)
            if (!(std::fabs(x(t, j)) <= 1e6))
                throw simulation_diverged_error("|X| exceeded 1e6 at step " + std::to_string(t) +
                                                ", variable " + std::to_string(j));
    }

    Eigen::MatrixXd obs = x.bottomRows(T);
    if (spec.obs_noise_sd > 0.0) {
        auto noise_eng =
            make_engine(derive_seed(s, {static_cast<std::uint64_t>(seed_stream::obs_noise)}));
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < N; ++j) obs(t, j) += spec.obs_noise_sd * unit(noise_eng);
    }
    std::vector<std::string> names;
    names.reserve(size_t(N));
    for (int j = 0; j < N; ++j) names.push_back("X" + std::to_string(j));
    return TimeSeriesDataset(std::move(obs), std::move(names));
}

struct GroundTruthGraph {
    int n_vars = 0;
    std::set<std::array<int, 3>> links;  // (source, lag, target)

    bool has(int source, int lag, int target) const {
        return links.count({source, lag, target}) > 0;
    }
};

// cross-links plus the (j, 1, j) autodependency for every nonzero a_j
inline GroundTruthGraph export_ground_truth(const SyntheticModelSpec& spec) {
    GroundTruthGraph g;
    g.n_vars = spec.n_vars;
    for (const ModelLink& l : spec.links) g.links.insert({l.i, l.tau, l.j});
    for (int j = 0; j < spec.n_vars; ++j)
        if (spec.autos[size_t(j)] != 0.0) g.links.insert({j, 1, j});
    return g;
}

}  // namespace tscausal
