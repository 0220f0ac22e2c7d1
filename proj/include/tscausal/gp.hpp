#pragma once

// Gaussian-process regression with a squared-exponential + white-noise kernel,
// hyperparameters by exact ML-II: the signal variance has a closed-form
// profile optimum, the noise-to-signal ratio g is optimized by golden section,
// and the length scale over a fixed log-spaced grid. One symmetric
// eigendecomposition per length scale makes every (g, signal) evaluation O(n),
// and the decompositions are reusable across responses sharing the same
// conditioning matrix.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "tscausal/errors.hpp"

namespace tscausal {

namespace gp_detail {

// noise floor; doubles as diagonal jitter
inline constexpr double kMinNoiseRatio = 1e-5;
inline constexpr double kMaxNoiseRatio = 1e3;

// length-scale grid factors, scaled by sqrt(dim) for standardized inputs
inline const std::vector<double> kLengthScaleFactors = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

struct ProfiledFit {
    double g = kMinNoiseRatio;     // noise-to-signal ratio
    double signal_var = 1.0;       // profiled sigma_f^2
    double neg_log_ml = std::numeric_limits<double>::infinity();
};

// Given eigenvalues lam of the unit-signal RBF Gram matrix and w = Q^T x_c,
// minimize the (doubled, constant-dropped) negative log marginal likelihood
//   n*log(sigma^2(g)) + sum(log(lam+g)),  sigma^2(g) = mean(w^2/(lam+g)).
inline ProfiledFit profile_noise(const Eigen::VectorXd& lam, const Eigen::VectorXd& w) {
    const int n = static_cast<int>(lam.size());
    auto objective = [&](double logg) {
        const double g = std::exp(logg);
        double s2 = 0.0, logdet = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = lam[i] + g;
            s2 += w[i] * w[i] / d;
            logdet += std::log(d);
        }
        s2 = std::max(s2 / n, 1e-300);
        return double(n) * std::log(s2) + logdet;
    };
    // golden section on log g
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(kMinNoiseRatio), b = std::log(kMaxNoiseRatio);
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = objective(c), fd = objective(d);
    for (int it = 0; it < 48; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = objective(d);
        }
    }
    const double logg = fc < fd ? c : d;
    ProfiledFit fit;
    fit.g = std::exp(logg);
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) s2 += w[i] * w[i] / (lam[i] + fit.g);
    fit.signal_var = std::max(s2 / n, 1e-300);
    fit.neg_log_ml = std::min(fc, fd);
    return fit;
}

}  // namespace gp_detail

// Eigendecompositions of the RBF Gram matrix over the length-scale grid for
// one fixed conditioning matrix z; reusable across responses.
class GpKernelCache {
public:
    explicit GpKernelCache(const Eigen::MatrixXd& z) : n_(static_cast<int>(z.rows())) {
        if (z.cols() == 0) throw contract_error("GpKernelCache: empty conditioning matrix");
        if (n_ < 10) throw insufficient_samples_error("gp regression needs n >= 10");
        Eigen::MatrixXd d2(n_, n_);
        for (int i = 0; i < n_; ++i) {
            d2(i, i) = 0.0;
            for (int j = 0; j < i; ++j) {
                const double v = (z.row(i) - z.row(j)).squaredNorm();
                d2(i, j) = v;
                d2(j, i) = v;
            }
        }
        const double scale = std::sqrt(double(z.cols()));
        decomps_.reserve(gp_detail::kLengthScaleFactors.size());
        for (double f : gp_detail::kLengthScaleFactors) {
            const double ell = f * scale;
            Eigen::MatrixXd r = (-d2.array() / (2.0 * ell * ell)).exp();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
            if (es.info() != Eigen::Success)
                throw conditioning_error("gp kernel eigendecomposition failed");
            Decomp dec;
            dec.ell = ell;
            dec.lam = es.eigenvalues().cwiseMax(0.0);
            dec.q = es.eigenvectors();
            decomps_.push_back(std::move(dec));
        }
    }

    int n() const { return n_; }

    // residual of x against the ML-II posterior mean at the training inputs
    Eigen::VectorXd regress_residuals(const Eigen::VectorXd& x) const {
        if (x.size() != n_) throw contract_error("gp regress: length mismatch");
        if (!x.allFinite()) throw conditioning_error("gp regress: non-finite response");
        Eigen::VectorXd xc = x.array() - x.mean();
        double best = std::numeric_limits<double>::infinity();
        const Decomp* best_dec = nullptr;
        gp_detail::ProfiledFit best_fit;
        Eigen::VectorXd w, best_w;
        for (const auto& dec : decomps_) {
            w.noalias() = dec.q.transpose() * xc;
            auto fit = gp_detail::profile_noise(dec.lam, w);
            if (fit.neg_log_ml < best) {
                best = fit.neg_log_ml;
                best_dec = &dec;
                best_fit = fit;
                best_w = w;
            }
        }
        // residual = x_c - R(R+gI)^-1 x_c = Q diag(g/(lam+g)) Q^T x_c
        Eigen::VectorXd scaled =
            best_w.array() * (best_fit.g / (best_dec->lam.array() + best_fit.g));
        return best_dec->q * scaled;
    }

private:
    struct Decomp {
        double ell = 1.0;
        Eigen::MatrixXd q;
        Eigen::VectorXd lam;
    };
    int n_ = 0;
    std::vector<Decomp> decomps_;
};

// Residual of x on z under the GP; empty z degenerates to centering.
inline Eigen::VectorXd gp_regress_residuals(const Eigen::VectorXd& x, const Eigen::MatrixXd& z) {
    if (z.cols() == 0) return x.array() - x.mean();
    if (z.rows() != x.size()) throw contract_error("gp_regress_residuals: row mismatch");
    GpKernelCache cache(z);
    return cache.regress_residuals(x);
}

}  // namespace tscausal
