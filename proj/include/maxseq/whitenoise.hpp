#pragma once

// Max-correlation white-noise test on AR(p) residuals.
//
// The statistic is max_{h<=L} |X(h)| with X(h) = residual_autocorr(e, h).
// Its first-order expansion replaces X(h) by m^{-1/2} sum_t z_t(h) where
//   z_t(h) = (e_t e_{t-h} + D(h)' (E[x x'])^{-1} x_t e_t) / E[e^2],
//   D(h)   = -E[e_t x_{t-h}] - E[e_{t-h} x_t],
// which accounts for having plugged in the estimated AR coefficients. D(h) is
// the expected derivative of e_t(theta) e_{t-h}(theta), so the plug-in term
// enters with a plus sign and on the correlation scale; for a fitted AR(1)
// this gives Var z_t(1) = phi^2, the familiar residual-autocorrelation result.
// p-values come from a dependent wild bootstrap of that expansion or from a
// Gaussian approximation with the estimated long-run covariance of z.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxseq/core.hpp"
#include "maxseq/estimate.hpp"

namespace maxseq {

/// Expansion pieces for one lag; time indices refer to the residual sample
/// t = 1..m, and z_hat covers t = h+1..m.
struct ExpansionComponents {
  std::size_t h = 0;
  Eigen::VectorXd d_hat;
  std::vector<double> z_hat;
  double sigma2_eps = 0.0;
  Eigen::MatrixXd xtx_inv;
};

/// Long-run covariance matrix of {z_t(h)}, h = 1..L.
struct KernelMatrix {
  Eigen::MatrixXd values;
  std::size_t bandwidth = 0;
};

enum class WnMethod { none, bootstrap, gaussian_kernel };

struct WnTestResult {
  double max_stat = 0.0;
  std::vector<double> per_lag;  // X(h), h = 1..L
  double p_value = 1.0;
  bool reject = false;
  WnMethod method = WnMethod::none;
  std::size_t p = 0;
  std::size_t L = 0;
  std::size_t block_len = 0;
  std::size_t reps = 0;
};

std::string to_string(WnMethod method);

/// Population quantities of a simulated AR(p) needed by the oracle expansion.
struct ArpTruth {
  Eigen::VectorXd theta0;             // [c, phi_1..phi_p]
  double sigma2_eps = 0.0;            // E[e^2]
  Eigen::MatrixXd exx;                // E[x x']
  std::vector<Eigen::VectorXd> d;     // D(h) for h = 1..L (index h-1)
};

/// Fits AR(p) and computes per-lag statistics (no p-value). Needs m > 3L.
WnTestResult max_corr_stat(std::span<const double> series, std::size_t p, std::size_t L);

/// Sample-analogue expansion terms for lag h from a fitted model and its
/// design matrix (ar_design of the same series).
ExpansionComponents expansion_terms(const ArFit& fit, const Eigen::MatrixXd& regressors, std::size_t h);

/// Closed-form moments of a stationary AR(p) (via Yule-Walker and the MA(inf)
/// weights) for lags 1..L. D(h) has entries -psi_{h-j} sigma^2 on y_{t-j}.
ArpTruth arp_truth(const Eigen::VectorXd& theta0, double innovation_variance, std::size_t L);

struct ExpansionGap {
  double gap = 0.0;                 // | max|X| - max|oracle| |
  double max_abs_diff = 0.0;        // max_h |X(h) - oracle(h)|
  std::vector<double> feasible;     // X(h)
  std::vector<double> oracle;       // m^{-1/2} sum_t z_t(h) with true moments
};

/// Feasible max statistic versus its expansion evaluated at the true
/// parameters, both over h = 1..L.
ExpansionGap expansion_gap(std::span<const double> series, const ArpTruth& truth, std::size_t p, std::size_t L);

/// Entry (h, g) is the Bartlett long-run covariance of z(h) and z(g) over the
/// dates where both exist (t = max(h,g)+1..m).
KernelMatrix estimate_z_kernel(const std::vector<ExpansionComponents>& components, std::size_t bandwidth);

/// floor(n^{1/3}), at least 1.
std::size_t default_block_length(std::size_t n);

struct WnOptions {
  std::size_t p = 1;
  std::size_t L = 1;
  std::size_t block_len = 0;  // 0: default_block_length(n)
  std::size_t reps = 500;
  double level = 0.05;
  RngSeed seed{};
  WnMethod method = WnMethod::bootstrap;
  std::size_t kernel_bandwidth = 0;  // gaussian_kernel only; 0: default_bandwidth(m)
  int threads = 0;
};

/// Dependent wild bootstrap: each replication draws block-constant standard
/// normal multipliers xi_t and records max_h |m^{-1/2} sum_t z_t(h) xi_t|.
/// p = (1 + #{draws >= stat}) / (1 + reps).
WnTestResult dwb_pvalue(std::span<const double> series, const WnOptions& options);

/// Gaussian approximation: draws from N(0, KernelMatrix) with the same
/// add-one p-value convention.
WnTestResult gaussian_kernel_pvalue(std::span<const double> series, const WnOptions& options);

/// Dispatches on options.method.
WnTestResult white_noise_test(std::span<const double> series, const WnOptions& options);

}  // namespace maxseq
