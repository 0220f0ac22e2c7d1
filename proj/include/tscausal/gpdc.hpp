#pragma once

// GPDC: GP-regression residuals + distance correlation, with the null
// distribution of dCor(u,v), u,v ~ U(0,1), pre-computed per sample size and
// optionally persisted to a versioned binary sidecar.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tscausal/ci_test.hpp"
#include "tscausal/dcor.hpp"
#include "tscausal/gp.hpp"
#include "tscausal/rng.hpp"

namespace tscausal {

inline constexpr std::uint64_t kDefaultNullTableSeed = 8642;
inline constexpr int kDefaultNullTableSize = 1000;

namespace gpdc_detail {

inline constexpr char kMagic[4] = {'T', 'S', 'G', 'N'};
inline constexpr std::uint32_t kVersion = 1;

struct SidecarHeader {
    char magic[4];
    std::uint32_t version;
    std::uint32_t n;
    std::uint32_t b_null;
    std::uint64_t seed;
};

inline std::string sidecar_name(int n, int b_null, std::uint64_t seed) {
    return "gpdc_null_n" + std::to_string(n) + "_B" + std::to_string(b_null) + "_s" +
           std::to_string(seed) + ".bin";
}

}  // namespace gpdc_detail

// B_null draws of dCor between independent uniform samples of size n, sorted.
inline std::vector<double> sample_gpdc_null_stats(int n, int b_null, std::uint64_t seed) {
    if (b_null < 100) throw contract_error("null table needs B_null >= 100");
    auto eng = make_engine(seed, {seed_stream::null_table, std::uint64_t(n), std::uint64_t(b_null)});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> stats;
    stats.reserve(size_t(b_null));
    Eigen::VectorXd u(n), v(n);
    for (int b = 0; b < b_null; ++b) {
        for (int i = 0; i < n; ++i) u[i] = unif(eng);
        for (int i = 0; i < n; ++i) v[i] = unif(eng);
        stats.push_back(distance_correlation(u, v));
    }
    std::sort(stats.begin(), stats.end());
    return stats;
}

// Per-sample-size sorted null statistics; entries built on demand exactly once
// (build-once contract under concurrency) and persisted when a cache dir is set.
class GpdcNullTable {
public:
    explicit GpdcNullTable(int b_null = kDefaultNullTableSize,
                           std::uint64_t seed = kDefaultNullTableSeed, std::string cache_dir = "")
        : b_null_(b_null), seed_(seed), cache_dir_(std::move(cache_dir)) {}

    int b_null() const { return b_null_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<double>& entry(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = tables_.find(n);
        if (it != tables_.end()) return it->second;
        std::vector<double> stats;
        if (!cache_dir_.empty() && try_load(n, stats)) {
            return tables_.emplace(n, std::move(stats)).first->second;
        }
        stats = sample_gpdc_null_stats(n, b_null_, seed_);
        if (!cache_dir_.empty()) save(n, stats);
        return tables_.emplace(n, std::move(stats)).first->second;
    }

    // fraction of null statistics >= observed
    double p_value(double stat, int n) {
        const auto& tbl = entry(n);
        auto lb = std::lower_bound(tbl.begin(), tbl.end(), stat);
        return double(tbl.end() - lb) / double(tbl.size());
    }

    void save(int n, const std::vector<double>& stats) const {
        namespace fs = std::filesystem;
        fs::create_directories(cache_dir_);
        const fs::path path = fs::path(cache_dir_) / gpdc_detail::sidecar_name(n, b_null_, seed_);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot write null table '" + path.string() + "'");
        gpdc_detail::SidecarHeader h{};
        std::memcpy(h.magic, gpdc_detail::kMagic, 4);
        h.version = gpdc_detail::kVersion;
        h.n = std::uint32_t(n);
        h.b_null = std::uint32_t(b_null_);
        h.seed = seed_;
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(reinterpret_cast<const char*>(stats.data()),
                  std::streamsize(stats.size() * sizeof(double)));
        if (!out) throw io_error("write failure on null table '" + path.string() + "'");
    }

    bool try_load(int n, std::vector<double>& stats) const {
        namespace fs = std::filesystem;
        const fs::path path = fs::path(cache_dir_) / gpdc_detail::sidecar_name(n, b_null_, seed_);
        std::ifstream in(path, std::ios::binary);
        if (!in) return false;
        gpdc_detail::SidecarHeader h{};
        in.read(reinterpret_cast<char*>(&h), sizeof h);
        if (!in || std::memcmp(h.magic, gpdc_detail::kMagic, 4) != 0 ||
            h.version != gpdc_detail::kVersion || h.n != std::uint32_t(n) ||
            h.b_null != std::uint32_t(b_null_) || h.seed != seed_)
            throw io_error("null table sidecar '" + path.string() + "' has a mismatched header");
        stats.assign(size_t(h.b_null), 0.0);
        in.read(reinterpret_cast<char*>(stats.data()), std::streamsize(stats.size() * sizeof(double)));
        if (!in) throw io_error("truncated null table sidecar '" + path.string() + "'");
        return true;
    }

private:
    int b_null_;
    std::uint64_t seed_;
    std::string cache_dir_;
    std::mutex mutex_;
    std::map<int, std::vector<double>> tables_;
};

inline std::shared_ptr<GpdcNullTable> build_gpdc_null_table(const std::vector<int>& sample_sizes,
                                                            int b_null, std::uint64_t seed,
                                                            const std::string& cache_dir = "") {
    auto table = std::make_shared<GpdcNullTable>(b_null, seed, cache_dir);
    for (int n : sample_sizes) table->entry(n);
    return table;
}

// GPDC on pre-built arrays (one-shot path without residual reuse).
inline CITestOutcome gpdc_test(const LaggedSampleArrays& a, GpdcNullTable& null_table) {
    Eigen::VectorXd rx = gp_regress_residuals(a.x, a.z);
    Eigen::VectorXd ry = gp_regress_residuals(a.y, a.z);
    const double stat = distance_correlation(copula_transform(rx), copula_transform(ry));
    CITestOutcome out;
    out.statistic = stat;
    out.p_value = null_table.p_value(stat, a.n);
    out.dof_or_n = a.n;
    return out;
}

// Discovery-facing GPDC test. Residuals are cached per (variable, condition
// set): within one run the same regression appears in many tests, and the two
// regressions of a single test share the kernel eigendecompositions.
class GpdcTest final : public CITest {
public:
    explicit GpdcTest(std::shared_ptr<GpdcNullTable> table) : table_(std::move(table)) {}
    GpdcTest() : table_(std::make_shared<GpdcNullTable>()) {}

    std::string name() const override { return "gpdc"; }

    CITestOutcome run(const TimeSeriesDataset& ds, LaggedVariable x, LaggedVariable y,
                      const std::vector<LaggedVariable>& conds, int tau_max) const override {
        // canonical condition order -> bit-stable kernels and cache hits
        std::vector<LaggedVariable> key = conds;
        std::sort(key.begin(), key.end());
        LaggedSampleArrays a = build_lagged_arrays(ds, x, y, key, tau_max);
        Eigen::VectorXd rx = residuals_for(x, key, a.x, a.z);
        Eigen::VectorXd ry = residuals_for(y, key, a.y, a.z);
        const double stat = distance_correlation(copula_transform(rx), copula_transform(ry));
        CITestOutcome out;
        out.statistic = stat;
        out.p_value = table_->p_value(stat, a.n);
        out.dof_or_n = a.n;
        return out;
    }

    GpdcNullTable& null_table() const { return *table_; }

private:
    using ResidualKey = std::pair<LaggedVariable, std::vector<LaggedVariable>>;

    Eigen::VectorXd residuals_for(LaggedVariable v, const std::vector<LaggedVariable>& conds,
                                  const Eigen::VectorXd& data, const Eigen::MatrixXd& z) const {
        if (z.cols() == 0) return data.array() - data.mean();
        ResidualKey key{v, conds};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = residuals_.find(key);
            if (it != residuals_.end()) return it->second;
        }
        std::shared_ptr<GpKernelCache> kernel;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (kernel_key_ == conds && kernel_ && kernel_->n() == z.rows()) kernel = kernel_;
        }
        if (!kernel) {
            kernel = std::make_shared<GpKernelCache>(z);
            std::lock_guard<std::mutex> lock(mutex_);
            kernel_ = kernel;
            kernel_key_ = conds;
        }
        Eigen::VectorXd r = kernel->regress_residuals(data);
        std::lock_guard<std::mutex> lock(mutex_);
        residuals_.emplace(std::move(key), r);
        return r;
    }

    std::shared_ptr<GpdcNullTable> table_;
    mutable std::mutex mutex_;
    mutable std::map<ResidualKey, Eigen::VectorXd> residuals_;
    mutable std::shared_ptr<GpKernelCache> kernel_;        // most recent conditioning matrix
    mutable std::vector<LaggedVariable> kernel_key_;
};

}  // namespace tscausal
