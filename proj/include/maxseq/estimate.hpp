#pragma once

// Least squares, residual autocorrelation and long-run variance estimators
// shared by the unit-root and white-noise tests.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace maxseq {

/// OLS fit of y_t = c + phi_1 y_{t-1} + ... + phi_p y_{t-p} + e_t on
/// t = p+1..n. Everything is normalised by the residual count m = n - p.
struct ArFit {
  std::size_t p = 0;
  Eigen::VectorXd theta_hat;    // [c, phi_1..phi_p]
  std::vector<double> residuals;  // e_{p+1}..e_n, length m
  Eigen::MatrixXd xtx_inv;      // (1/m sum x_t x_t')^{-1}
  double sigma2_eps_hat = 0.0;  // (1/m) sum e_t^2

  std::size_t m() const { return residuals.size(); }
};

/// Short-run and long-run variance of one residual sequence.
struct VariancePair {
  double sigma2_hat = 0.0;
  double sigma2_eps_hat = 0.0;
  std::size_t bandwidth = 0;
};

/// m x (p+1) regressor matrix with rows x_t = [1, y_{t-1}, ..., y_{t-p}].
Eigen::MatrixXd ar_design(std::span<const double> series, std::size_t p);

/// sum_{t>=2} y_t y_{t-1} / sum_{t>=2} y_{t-1}^2.
double ols_ar1_no_intercept(std::span<const double> series);

/// Requires n > 3(p+1) and a moment matrix with condition number below 1e12.
ArFit ols_arp(std::span<const double> series, std::size_t p);

/// sqrt(m) * sum_{t=h+1..m} e_t e_{t-h} / sum_{t=1..m} e_t^2.
double residual_autocorr(std::span<const double> residuals, std::size_t h);

/// Bartlett-kernel long-run covariance of two equal-length sequences,
///   G_0 + sum_{j=1..b} (1 - j/(b+1)) (G_j + G_j'),
/// G_j = (1/T) sum_t (a_t - abar)(b_{t-j} - bbar).
double long_run_covariance(std::span<const double> a, std::span<const double> b, std::size_t bandwidth);

/// Bartlett long-run variance of a series (demeaned autocovariances).
/// bandwidth = 0 gives the demeaned sample variance.
double long_run_variance(std::span<const double> series, std::size_t bandwidth);

/// floor(4 (n/100)^{2/9}).
std::size_t default_bandwidth(std::size_t n);

/// sigma2_eps_hat is the bandwidth-0 value, so the pair is equal exactly when
/// bandwidth = 0.
VariancePair variance_pair(std::span<const double> residuals, std::size_t bandwidth);

}  // namespace maxseq
