#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tscausal/stats.hpp"

using namespace tscausal;

namespace {

TEST(Stats, MeanAndSampleSd) {
    Eigen::VectorXd v(4);
    v << 1, 2, 3, 6;
    EXPECT_DOUBLE_EQ(mean(v), 3.0);
    // sample variance with n-1: ((2^2 + 1 + 0 + 9)) / 3
    EXPECT_DOUBLE_EQ(sample_sd(v), std::sqrt((4.0 + 1.0 + 0.0 + 9.0) / 3.0));
}

TEST(Stats, PearsonMatchesHandValue) {
    Eigen::VectorXd x(5), y(5);
    x << 1, 2, 3, 4, 5;
    y << 2, 1, 4, 3, 5;
    // direct computation: cov/sd_x/sd_y on the same centered sums
    const double r = pearson(x, y);
    EXPECT_NEAR(r, 0.8, 1e-12);
    EXPECT_DOUBLE_EQ(pearson(x, x), 1.0);
    Eigen::VectorXd neg = -x;
    EXPECT_DOUBLE_EQ(pearson(x, neg), -1.0);
}

TEST(Stats, PearsonErrors) {
    Eigen::VectorXd x(3), y(4), flat(3);
    x << 1, 2, 3;
    y << 1, 2, 3, 4;
    flat << 5, 5, 5;
    EXPECT_THROW(pearson(x, y), contract_error);
    EXPECT_THROW(pearson(x, flat), degenerate_data_error);
}

TEST(Stats, OlsResidualsOrthogonalAndExact) {
    // y = 2 + 3*z0 - z1 exactly -> residuals are numerically zero
    Eigen::MatrixXd z(6, 2);
    z << 0, 1, 1, 0, 2, 2, 3, 1, 4, 5, 5, 3;
    Eigen::VectorXd y = 2.0 + 3.0 * z.col(0).array() - z.col(1).array();
    Eigen::VectorXd r = ols_residuals(z, y);
    EXPECT_LT(r.lpNorm<Eigen::Infinity>(), 1e-10);

    // generic response: residuals orthogonal to the centered design and to 1
    Eigen::VectorXd y2(6);
    y2 << 3, -1, 4, 1, -5, 9;
    Eigen::VectorXd r2 = ols_residuals(z, y2);
    EXPECT_NEAR(r2.sum(), 0.0, 1e-10);
    Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
    EXPECT_LT((zc.transpose() * r2).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Stats, OlsResidualsEmptyDesignCenters) {
    Eigen::MatrixXd z(4, 0);
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 6;
    Eigen::VectorXd r = ols_residuals(z, y);
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(r[i], y[i] - 3.0);
}

TEST(Stats, StudentTPvalueAgainstKnownQuantiles) {
    // two-sided: t = 0 -> 1; symmetric
    EXPECT_DOUBLE_EQ(student_t_pvalue(0.0, 10.0), 1.0);
    EXPECT_DOUBLE_EQ(student_t_pvalue(1.5, 7.0), student_t_pvalue(-1.5, 7.0));
    // dof=1 is a Cauchy: P(|T| > 1) = 0.5 exactly
    EXPECT_NEAR(student_t_pvalue(1.0, 1.0), 0.5, 1e-12);
    // large dof approaches the normal tail: P(|Z| > 1.959964) ~ 0.05
    EXPECT_NEAR(student_t_pvalue(1.959964, 1e7), 0.05, 1e-4);
    EXPECT_THROW(student_t_pvalue(1.0, 0.0), contract_error);
    EXPECT_DOUBLE_EQ(student_t_pvalue(std::numeric_limits<double>::infinity(), 5.0), 0.0);
}

TEST(Stats, QuantileType7Interpolation) {
    std::vector<double> v = {4.0, 1.0, 3.0, 2.0};  // sorted: 1 2 3 4
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);   // h = 1.5
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);  // h = 0.75
    std::vector<double> one = {7.0};
    EXPECT_DOUBLE_EQ(quantile(one, 0.3), 7.0);
}

}  // namespace
