#pragma once

// Small shared numerics: moments, Pearson correlation, OLS residuals,
// Student-t tail probabilities, quantiles.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <vector>

#include "tscausal/errors.hpp"

namespace tscausal {

inline double mean(const Eigen::VectorXd& v) { return v.mean(); }

// sample standard deviation (n-1 denominator)
inline double sample_sd(const Eigen::VectorXd& v) {
    const auto n = v.size();
    if (n < 2) return 0.0;
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().sum() / double(n - 1));
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2) throw contract_error("pearson: length mismatch");
    const double ma = a.mean(), mb = b.mean();
    Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
    const double sa = std::sqrt(da.square().sum()), sb = std::sqrt(db.square().sum());
    if (sa == 0.0 || sb == 0.0)
        throw degenerate_data_error("pearson: zero-variance input");
    double r = (da * db).sum() / (sa * sb);
    return std::clamp(r, -1.0, 1.0);
}

// Residuals of y regressed on [1, Z] (intercept always included; empty Z
// means plain centering). Rank-revealing QR so collinear condition sets
// still project onto the spanned subspace.
inline Eigen::VectorXd ols_residuals(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    if (Z.rows() != 0 && Z.rows() != n) throw contract_error("ols_residuals: row mismatch");
    const double my = y.mean();
    Eigen::VectorXd yc = y.array() - my;
    if (Z.cols() == 0) return yc;
    Eigen::MatrixXd Zc = Z.rowwise() - Z.colwise().mean();
    Eigen::VectorXd beta = Zc.colPivHouseholderQr().solve(yc);
    return yc - Zc * beta;
}

// two-sided p-value of a t statistic
inline double student_t_pvalue(double t, double dof) {
    if (dof <= 0) throw contract_error("student_t_pvalue: dof <= 0");
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

// linearly interpolated quantile (same convention as numpy's default);
// q in [0,1], data need not be sorted
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw contract_error("quantile: empty data");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(v.begin(), v.end());
    const double h = q * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

}  // namespace tscausal
