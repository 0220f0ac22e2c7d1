#pragma once

// Linear partial-correlation test: Pearson correlation of the OLS residuals
// of x and y on the conditions, with a t-distributed null.

#include <cmath>

#include "tscausal/ci_test.hpp"
#include "tscausal/stats.hpp"

namespace tscausal {

inline CITestOutcome parcorr_test(const LaggedSampleArrays& a) {
    const int n = a.n;
    const int dz = static_cast<int>(a.z.cols());
    const int dof = n - 2 - dz;
    if (dof <= 0)
        throw insufficient_samples_error("parcorr: dof = n-2-D_Z = " + std::to_string(dof));

    Eigen::VectorXd rx = ols_residuals(a.z, a.x);
    Eigen::VectorXd ry = ols_residuals(a.z, a.y);
    const double rho = pearson(rx, ry);

    CITestOutcome out;
    out.statistic = rho;
    out.dof_or_n = dof;
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0) {
        out.p_value = 0.0;
    } else {
        const double t = rho * std::sqrt(double(dof) / denom);
        out.p_value = student_t_pvalue(t, double(dof));
    }
    return out;
}

class ParCorrTest final : public CITest {
public:
    std::string name() const override { return "parcorr"; }
    CITestOutcome run(const TimeSeriesDataset& ds, LaggedVariable x, LaggedVariable y,
                      const std::vector<LaggedVariable>& conds, int tau_max) const override {
        // canonical condition order: results must not depend on how the caller
        // happened to assemble the set
        std::vector<LaggedVariable> sorted = conds;
        std::sort(sorted.begin(), sorted.end());
        return parcorr_test(build_lagged_arrays(ds, x, y, sorted, tau_max));
    }
};

}  // namespace tscausal
