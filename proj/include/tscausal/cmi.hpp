#pragma once

// Conditional mutual information by k-nearest-neighbor estimation (maximum
// norm, digamma counts) with a local permutation test: surrogate x-values are
// drawn from each sample's k_perm nearest neighbors in z-space, destroying the
// x-y link while preserving x-z dependence.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tscausal/ci_test.hpp"
#include "tscausal/rng.hpp"
#include "tscausal/stats.hpp"

namespace tscausal {

struct CmiTestConfig {
    int k_cmi = 50;
    int k_perm = 5;
    int B = 500;
    std::uint64_t rng_seed = 0;
};

namespace cmi_detail {

inline constexpr double kTieNoiseAmplitude = 1e-10;

// digamma lookup for integer arguments 0..n (index 0 unused)
inline std::vector<double> digamma_table(int n) {
    std::vector<double> psi(size_t(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i) psi[size_t(i)] = boost::math::digamma(double(i));
    return psi;
}

// deterministic seeded jitter breaking exact ties before neighbor searches
inline void add_tie_noise(Eigen::VectorXd& v, std::mt19937_64& eng) {
    const double sd = sample_sd(v);
    const double amp = kTieNoiseAmplitude * (sd > 0.0 ? sd : 1.0);
    std::normal_distribution<double> noise(0.0, amp);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += noise(eng);
}

struct NoisedArrays {
    Eigen::VectorXd x, y;
    Eigen::MatrixXd z;
};

inline NoisedArrays noise_arrays(const LaggedSampleArrays& a, std::uint64_t seed) {
    NoisedArrays out{a.x, a.y, a.z};
    auto eng = make_engine(seed, {seed_stream::cmi_noise});
    add_tie_noise(out.x, eng);
    add_tie_noise(out.y, eng);
    for (Eigen::Index c = 0; c < out.z.cols(); ++c) {
        Eigen::VectorXd col = out.z.col(c);
        add_tie_noise(col, eng);
        out.z.col(c) = col;
    }
    return out;
}

// KSG-style CMI on noise-augmented data.
inline double estimate(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& z, int k, const std::vector<double>& psi) {
    const int n = static_cast<int>(x.size());
    const int dz = static_cast<int>(z.cols());
    if (k >= n || k < 1) throw contract_error("cmi_estimate: need 1 <= k < n");

    std::vector<double> djoint(static_cast<size_t>(n)), dxz(djoint), dyz(djoint), dzz(djoint);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
            const double dx = std::fabs(x[i] - x[l]);
            const double dy = std::fabs(y[i] - y[l]);
            double dzv = 0.0;
            for (int c = 0; c < dz; ++c) dzv = std::max(dzv, std::fabs(z(i, c) - z(l, c)));
            dzz[size_t(l)] = dzv;
            dxz[size_t(l)] = std::max(dx, dzv);
            dyz[size_t(l)] = std::max(dy, dzv);
            djoint[size_t(l)] = std::max(dxz[size_t(l)], dy);
        }
        djoint[size_t(i)] = std::numeric_limits<double>::infinity();  // exclude self from eps
        std::nth_element(djoint.begin(), djoint.begin() + (k - 1), djoint.end());
        const double eps = djoint[size_t(k - 1)];

        // strict inequality; the reference point itself counts
        int kxz = 0, kyz = 0, kz = 0;
        for (int l = 0; l < n; ++l) {
            if (dxz[size_t(l)] < eps) ++kxz;
            if (dyz[size_t(l)] < eps) ++kyz;
            if (dzz[size_t(l)] < eps) ++kz;
        }
        if (dz == 0) kz = n;
        acc += psi[size_t(std::max(kz, 1))] - psi[size_t(std::max(kxz, 1))] -
               psi[size_t(std::max(kyz, 1))];
    }
    return psi[size_t(k)] + acc / double(n);
}

// k_perm nearest neighbors of every sample in z-space (self included)
inline std::vector<std::vector<int>> z_neighbor_lists(const Eigen::MatrixXd& z, int k_perm) {
    const int n = static_cast<int>(z.rows());
    const int dz = static_cast<int>(z.cols());
    const int k = std::min(k_perm, n);
    std::vector<std::vector<int>> lists(static_cast<size_t>(n));
    std::vector<std::pair<double, int>> dist(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
            double d = 0.0;
            for (int c = 0; c < dz; ++c) d = std::max(d, std::fabs(z(i, c) - z(l, c)));
            dist[size_t(l)] = {d, l};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        lists[size_t(i)].reserve(size_t(k));
        for (int m = 0; m < k; ++m) lists[size_t(i)].push_back(dist[size_t(m)].second);
    }
    return lists;
}

}  // namespace cmi_detail

// CMI estimate in nats; empty z reduces to the Kraskov MI estimator.
inline double cmi_estimate(const LaggedSampleArrays& a, int k,
                           std::uint64_t noise_seed = 0x7469656e) {
    if (k >= a.n || k < 1) throw contract_error("cmi_estimate: need 1 <= k < n");
    auto noised = cmi_detail::noise_arrays(a, noise_seed);
    const auto psi = cmi_detail::digamma_table(a.n);
    return cmi_detail::estimate(noised.x, noised.y, noised.z, k, psi);
}

inline CITestOutcome cmi_local_permutation_test(const LaggedSampleArrays& a,
                                                const CmiTestConfig& cfg) {
    if (cfg.k_cmi < 1 || cfg.k_perm < 1 || cfg.B < 1)
        throw contract_error("cmi_local_permutation_test: bad config");
    if (cfg.k_cmi >= a.n) throw contract_error("cmi_local_permutation_test: k_cmi >= n");

    const int n = a.n;
    auto noised = cmi_detail::noise_arrays(a, cfg.rng_seed);
    const auto psi = cmi_detail::digamma_table(n);
    const double observed = cmi_detail::estimate(noised.x, noised.y, noised.z, cfg.k_cmi, psi);

    const bool empty_z = noised.z.cols() == 0;
    std::vector<std::vector<int>> neighbors;
    if (!empty_z) neighbors = cmi_detail::z_neighbor_lists(noised.z, cfg.k_perm);

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    int exceed = 0;
    Eigen::VectorXd xs(n);
    std::vector<char> used(static_cast<size_t>(n));
    std::vector<int> shuffled;
    for (int b = 0; b < cfg.B; ++b) {
        auto eng = make_engine(cfg.rng_seed, {seed_stream::cmi_surrogate, std::uint64_t(b)});
        if (empty_z) {
            std::vector<int> perm = order;
            std::shuffle(perm.begin(), perm.end(), eng);
            for (int i = 0; i < n; ++i) xs[i] = noised.x[perm[size_t(i)]];
        } else {
            std::vector<int> traversal = order;
            std::shuffle(traversal.begin(), traversal.end(), eng);
            std::fill(used.begin(), used.end(), 0);
            for (int i : traversal) {
                shuffled = neighbors[size_t(i)];
                std::shuffle(shuffled.begin(), shuffled.end(), eng);
                int pick = -1;
                for (int cand : shuffled)
                    if (!used[size_t(cand)]) {
                        pick = cand;
                        break;
                    }
                if (pick < 0) {
                    // all candidates already used: accept a reuse
                    std::uniform_int_distribution<int> d(0, int(shuffled.size()) - 1);
                    pick = shuffled[size_t(d(eng))];
                }
                used[size_t(pick)] = 1;
                xs[i] = noised.x[pick];
            }
        }
        const double surrogate = cmi_detail::estimate(xs, noised.y, noised.z, cfg.k_cmi, psi);
        if (surrogate >= observed) ++exceed;
    }

    CITestOutcome out;
    out.statistic = observed;
    out.p_value = double(1 + exceed) / double(cfg.B + 1);
    out.dof_or_n = n;
    return out;
}

// Discovery-facing CMI test; per-link seeds derived from the config seed and
// the link identity keep results independent of scheduling.
class CmiTest final : public CITest {
public:
    explicit CmiTest(CmiTestConfig cfg) : cfg_(cfg) {}

    std::string name() const override { return "cmi"; }

    CITestOutcome run(const TimeSeriesDataset& ds, LaggedVariable x, LaggedVariable y,
                      const std::vector<LaggedVariable>& conds, int tau_max) const override {
        std::vector<LaggedVariable> sorted = conds;
        std::sort(sorted.begin(), sorted.end());
        LaggedSampleArrays a = build_lagged_arrays(ds, x, y, sorted, tau_max);
        CmiTestConfig local = cfg_;
        std::uint64_t h = derive_seed(cfg_.rng_seed, {std::uint64_t(x.var_index), std::uint64_t(x.lag),
                                                      std::uint64_t(y.var_index), std::uint64_t(y.lag)});
        for (auto c : sorted)
            h = derive_seed(h, {std::uint64_t(c.var_index), std::uint64_t(c.lag)});
        local.rng_seed = h;
        return cmi_local_permutation_test(a, local);
    }

    const CmiTestConfig& config() const { return cfg_; }

private:
    CmiTestConfig cfg_;
};

}  // namespace tscausal
