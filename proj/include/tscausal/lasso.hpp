#pragma once

// L1-penalized least squares by cyclic coordinate descent, wrapped in the
// iterated reweighting that gives adaptive-lasso estimates. The penalty level
// is picked by expanding-window cross-validation (time order preserved, 5
// contiguous test blocks) on one-step squared prediction error. No intercept:
// callers pass standardized data.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tscausal/errors.hpp"
#include "tscausal/stats.hpp"

namespace tscausal {

struct LassoResult {
    Eigen::VectorXd coefficients;   // re-weighted (effective) scale
    std::vector<int> active;        // indices with nonzero final coefficient
    std::vector<double> p_values;   // OLS-refit p on the active set, exactly 1 elsewhere
    double lambda = 0.0;            // penalty chosen at the last iteration
};

namespace lasso_detail {

// min_b (1/2n)||y - X b||^2 + lambda ||b||_1; warm-startable
inline Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          double lambda, Eigen::VectorXd beta,
                                          int max_sweeps = 2000, double tol = 1e-10) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (beta.size() != d) beta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd colsq(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        colsq[j] = X.col(j).squaredNorm() / double(n);
        if (colsq[j] <= 0.0) beta[j] = 0.0;  // dead column never enters
    }
    Eigen::VectorXd r = y - X * beta;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_step = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (colsq[j] <= 0.0) continue;
            const double rho = X.col(j).dot(r) / double(n) + colsq[j] * beta[j];
            double b = 0.0;
            if (rho > lambda)
                b = (rho - lambda) / colsq[j];
            else if (rho < -lambda)
                b = (rho + lambda) / colsq[j];
            const double delta = b - beta[j];
            if (delta != 0.0) {
                r -= delta * X.col(j);
                beta[j] = b;
                max_step = std::max(max_step, std::fabs(delta) * std::sqrt(colsq[j]));
            }
        }
        if (max_step < tol) break;
    }
    return beta;
}

// descending log-spaced path from the smallest lambda that zeroes everything
inline std::vector<double> lambda_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       int count = 30, double ratio = 1e-3) {
    const Eigen::Index n = X.rows();
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        lmax = std::max(lmax, std::fabs(X.col(j).dot(y)) / double(n));
    if (!(lmax > 0.0) || !std::isfinite(lmax)) return {0.0};
    std::vector<double> path(static_cast<size_t>(count));
    const double lmin = lmax * ratio;
    for (int k = 0; k < count; ++k)
        path[size_t(k)] = std::exp(std::log(lmax) +
                                   (std::log(lmin) - std::log(lmax)) * double(k) / double(count - 1));
    return path;
}

struct CvSplit {
    int train_end = 0;  // train rows [0, train_end)
    int test_begin = 0;
    int test_end = 0;
};

// expanding-window splits: remainder rows join the first training block, each
// of the n_splits test blocks has identical size
inline std::vector<CvSplit> expanding_splits(int n, int n_splits = 5) {
    const int folds = n_splits + 1;
    const int test_size = n / folds;
    if (test_size < 20)
        throw config_error("cross-validation blocks of " + std::to_string(test_size) +
                           " samples; need at least 20 (n=" + std::to_string(n) + ", " +
                           std::to_string(n_splits) + " splits)");
    std::vector<CvSplit> out;
    out.reserve(size_t(n_splits));
    for (int s = test_size + n % folds; s + test_size <= n; s += test_size)
        out.push_back({s, s, s + test_size});
    return out;
}

// mean one-step squared prediction error across splits; ties keep the larger
// penalty (path is descending)
inline double cv_select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const std::vector<double>& path,
                               const std::vector<CvSplit>& splits) {
    if (path.size() == 1) return path.front();
    std::vector<double> mse(path.size(), 0.0);
    for (const CvSplit& sp : splits) {
        const Eigen::MatrixXd Xtr = X.topRows(sp.train_end);
        const Eigen::VectorXd ytr = y.head(sp.train_end);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
        for (std::size_t li = 0; li < path.size(); ++li) {
            beta = coordinate_descent(Xtr, ytr, path[li], std::move(beta));
            const int len = sp.test_end - sp.test_begin;
            const Eigen::VectorXd err = y.segment(sp.test_begin, len) -
                                        X.middleRows(sp.test_begin, len) * beta;
            mse[li] += err.squaredNorm() / double(len);
        }
    }
    std::size_t best = 0;
    for (std::size_t li = 1; li < path.size(); ++li)
        if (mse[li] < mse[best]) best = li;
    return path[best];
}

}  // namespace lasso_detail

// Iterated reweighting: k_max rounds of {scale columns by 1/w, lasso with
// cross-validated lambda, w_j = 1/(2*sqrt(|b_j|) + eps)} with eps the smallest
// positive normal double, then an OLS refit on the surviving columns for
// p-values. Zeroed coefficients push their weight to 1/eps, which kills the
// column for all later rounds.
inline LassoResult adaptive_lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      int k_max = 5) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (y.size() != n) throw contract_error("adaptive_lasso_fit: row mismatch");
    if (k_max < 1) throw contract_error("adaptive_lasso_fit: k_max must be >= 1");
    const auto splits = lasso_detail::expanding_splits(int(n));

    const double eps = std::numeric_limits<double>::min();
    Eigen::VectorXd w = Eigen::VectorXd::Ones(d);
    Eigen::VectorXd beta_eff = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd Xs(n, d);
    double lambda_n = 0.0;
    for (int k = 0; k < k_max; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) Xs.col(j) = X.col(j) / w[j];
        const auto path = lasso_detail::lambda_path(Xs, y);
        lambda_n = lasso_detail::cv_select_lambda(Xs, y, path, splits);
        const Eigen::VectorXd beta_scaled =
            lasso_detail::coordinate_descent(Xs, y, lambda_n, Eigen::VectorXd::Zero(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            beta_eff[j] = beta_scaled[j] / w[j];
            w[j] = 1.0 / (2.0 * std::sqrt(std::fabs(beta_eff[j])) + eps);
        }
    }

    LassoResult res;
    res.coefficients = beta_eff;
    res.lambda = lambda_n;
    res.p_values.assign(size_t(d), 1.0);
    for (Eigen::Index j = 0; j < d; ++j)
        if (beta_eff[j] != 0.0) res.active.push_back(int(j));

    if (!res.active.empty()) {
        const int m = int(res.active.size());
        const int dof = int(n) - m;
        if (dof <= 0)
            throw insufficient_samples_error("lasso refit: " + std::to_string(m) +
                                             " active regressors and only " + std::to_string(n) +
                                             " samples");
        Eigen::MatrixXd Xa(n, m);
        for (int k = 0; k < m; ++k) Xa.col(k) = X.col(res.active[size_t(k)]);
        const Eigen::MatrixXd xtx = Xa.transpose() * Xa;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
        if (ldlt.info() != Eigen::Success)
            throw conditioning_error("lasso refit: singular active-set design");
        const Eigen::VectorXd bhat = ldlt.solve(Xa.transpose() * y);
        const double s2 = (y - Xa * bhat).squaredNorm() / double(dof);
        const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
        for (int k = 0; k < m; ++k) {
            const double se = std::sqrt(std::max(s2 * cov(k, k), 0.0));
            const double t = se > 0.0 ? bhat[k] / se
                                      : std::numeric_limits<double>::infinity();
            res.p_values[size_t(res.active[size_t(k)])] = student_t_pvalue(t, double(dof));
        }
    }
    return res;
}

}  // namespace tscausal
