#include "maxseq/estimate.hpp"

#include <cmath>
#include <string>

#include "maxseq/core.hpp"
#include "maxseq/kernels.hpp"

namespace maxseq {

Eigen::MatrixXd ar_design(std::span<const double> series, std::size_t p) {
  if (series.size() <= p) throw ValidationError("series shorter than AR order");
  const std::size_t m = series.size() - p;
  Eigen::MatrixXd x(m, p + 1);
  for (std::size_t r = 0; r < m; ++r) {
    x(r, 0) = 1.0;
    for (std::size_t j = 1; j <= p; ++j) x(r, j) = series[p + r - j];
  }
  return x;
}

double ols_ar1_no_intercept(std::span<const double> series) {
  if (series.size() < 2) throw ValidationError("AR(1) fit needs at least 2 observations");
  const std::size_t n = series.size();
  const double den = kernels::sum_sq(series.first(n - 1));
  if (!(den > 0.0)) throw NumericalError("degenerate regressor");
  const double num = kernels::dot(series.subspan(1), series.first(n - 1));
  return num / den;
}

ArFit ols_arp(std::span<const double> series, std::size_t p) {
  const std::size_t n = series.size();
  if (n <= 3 * (p + 1)) {
    throw ValidationError("AR(" + std::to_string(p) + ") fit needs more than " + std::to_string(3 * (p + 1)) +
                          " observations");
  }
  const std::size_t m = n - p;
  const Eigen::MatrixXd x = ar_design(series, p);
  const Eigen::Map<const Eigen::VectorXd> y(series.data() + p, static_cast<Eigen::Index>(m));

  const Eigen::MatrixXd moment = (x.transpose() * x) / static_cast<double>(m);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo < 1e12)) throw NumericalError("singular moment matrix");

  ArFit fit;
  fit.p = p;
  fit.theta_hat = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - x * fit.theta_hat;
  fit.residuals.assign(resid.data(), resid.data() + m);
  fit.xtx_inv = moment.ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  fit.sigma2_eps_hat = kernels::sum_sq(fit.residuals) / static_cast<double>(m);
  return fit;
}

double residual_autocorr(std::span<const double> residuals, std::size_t h) {
  const std::size_t m = residuals.size();
  if (h < 1) throw ValidationError("autocorrelation lag must be at least 1");
  if (h >= m) throw ValidationError("lag exceeds sample");
  const double den = kernels::sum_sq(residuals);
  if (!(den > 0.0)) throw NumericalError("degenerate residual variance");
  const double num = kernels::dot(residuals.subspan(h), residuals.first(m - h));
  return std::sqrt(static_cast<double>(m)) * num / den;
}

double long_run_covariance(std::span<const double> a, std::span<const double> b, std::size_t bandwidth) {
  const std::size_t len = a.size();
  if (b.size() != len) throw ValidationError("long-run covariance needs equal-length inputs");
  if (len == 0) throw ValidationError("empty sequence");
  if (bandwidth >= len) throw ValidationError("bandwidth must be below the sample length");

  const auto& k = kernels::active();
  const double t = static_cast<double>(len);
  std::vector<double> ac(len);
  k.subtract_scalar(a.data(), k.sum(a.data(), len) / t, ac.data(), len);
  std::vector<double> bc;
  const double* bp = ac.data();
  if (b.data() != a.data()) {
    bc.resize(len);
    k.subtract_scalar(b.data(), k.sum(b.data(), len) / t, bc.data(), len);
    bp = bc.data();
  }

  double acc = k.dot(ac.data(), bp, len) / t;
  const double denom = static_cast<double>(bandwidth + 1);
  for (std::size_t j = 1; j <= bandwidth; ++j) {
    const double w = 1.0 - static_cast<double>(j) / denom;
    const double g_ab = k.dot(ac.data() + j, bp, len - j) / t;
    const double g_ba = k.dot(bp + j, ac.data(), len - j) / t;
    acc += w * (g_ab + g_ba);
  }
  return acc;
}

double long_run_variance(std::span<const double> series, std::size_t bandwidth) {
  return long_run_covariance(series, series, bandwidth);
}

std::size_t default_bandwidth(std::size_t n) {
  if (n < 2) throw ValidationError("default_bandwidth needs n >= 2");
  return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

VariancePair variance_pair(std::span<const double> residuals, std::size_t bandwidth) {
  VariancePair v;
  v.bandwidth = bandwidth;
  v.sigma2_eps_hat = long_run_variance(residuals, 0);
  v.sigma2_hat = bandwidth == 0 ? v.sigma2_eps_hat : long_run_variance(residuals, bandwidth);
  return v;
}

}  // namespace maxseq
