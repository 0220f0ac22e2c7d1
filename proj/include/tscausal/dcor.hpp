#pragma once

// Distance correlation on rank-transformed (copula) samples: the GPDC
// statistic of the residual pair.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tscausal/errors.hpp"

namespace tscausal {

// Ranks mapped to uniform marginals: rank/n with the top rank pulled to
// (n-0.5)/n so no value hits exactly 1. Ties broken by original index.
inline Eigen::VectorXd copula_transform(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    if (n < 2) throw contract_error("copula_transform: need n >= 2");
    if (v.maxCoeff() == v.minCoeff())
        throw degenerate_data_error("copula_transform: all values equal, ranks degenerate");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
    Eigen::VectorXd u(n);
    for (int r = 0; r < n; ++r) {
        const double rank = double(r + 1);
        u[order[size_t(r)]] = (r + 1 == n ? (double(n) - 0.5) : rank) / double(n);
    }
    return u;
}

// Sample distance correlation via dCov^2 = (1/n^2) sum A.*B on doubly-centered
// absolute-distance matrices. O(n^2) time and memory.
inline double distance_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n || n < 2) throw contract_error("distance_correlation: bad sizes");

    auto centered = [n](const Eigen::VectorXd& v) {
        Eigen::MatrixXd d(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = std::fabs(v[i] - v[j]);
        const Eigen::VectorXd rowm = d.rowwise().mean();
        const double grand = rowm.mean();
        d.colwise() -= rowm;
        d.rowwise() -= rowm.transpose();
        d.array() += grand;
        return d;
    };
    Eigen::MatrixXd a = centered(x);
    Eigen::MatrixXd b = centered(y);

    double dcov2 = 0.0, dvarx = 0.0, dvary = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            dcov2 += a(i, j) * b(i, j);
            dvarx += a(i, j) * a(i, j);
            dvary += b(i, j) * b(i, j);
        }
    const double denom = std::sqrt(dvarx * dvary);
    if (denom <= 0.0) return 0.0;
    const double r2 = dcov2 / denom;
    return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

}  // namespace tscausal
