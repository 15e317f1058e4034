#include "maxseq/whitenoise.hpp"

#include <algorithm>
#include <cmath>

#include "maxseq/dgp.hpp"
#include "maxseq/kernels.hpp"
#include "maxseq/parallel.hpp"

namespace maxseq {
namespace {

void check_lags(std::size_t m, std::size_t L) {
  if (L < 1) throw ValidationError("max-correlation statistic needs L >= 1");
  if (L >= m) throw ValidationError("lag exceeds sample");
  if (3 * L >= m) throw ValidationError("too many lags for the residual sample (need m > 3L)");
}

// Residuals that are rounding noise relative to the data scale mean the model
// fits exactly; the correlation ratio is then meaningless.
void check_residual_scale(std::span<const double> series, const ArFit& fit) {
  const double scale = kernels::sum_sq(series) / static_cast<double>(series.size());
  if (!(fit.sigma2_eps_hat > 1e-20 * scale)) throw NumericalError("degenerate residual variance");
}

struct FittedLags {
  ArFit fit;
  Eigen::MatrixXd design;
  WnTestResult result;
};

FittedLags fit_and_measure(std::span<const double> series, std::size_t p, std::size_t L) {
  FittedLags f;
  f.fit = ols_arp(series, p);
  check_lags(f.fit.m(), L);
  check_residual_scale(series, f.fit);
  f.design = ar_design(series, p);
  f.result.p = p;
  f.result.L = L;
  f.result.per_lag.reserve(L);
  for (std::size_t h = 1; h <= L; ++h) f.result.per_lag.push_back(residual_autocorr(f.fit.residuals, h));
  f.result.max_stat = max_abs(f.result.per_lag);
  return f;
}

void validate_options(const WnOptions& o) {
  if (o.reps == 0) throw ValidationError("no bootstrap draws");
  if (!(o.level > 0.0 && o.level < 1.0)) throw ValidationError("level must lie in (0,1)");
}

double add_one_pvalue(const std::vector<double>& draws, double stat) {
  const auto count = std::count_if(draws.begin(), draws.end(), [&](double d) { return d >= stat; });
  return (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(draws.size()));
}

}  // namespace

std::string to_string(WnMethod method) {
  switch (method) {
    case WnMethod::none:
      return "none";
    case WnMethod::bootstrap:
      return "bootstrap";
    case WnMethod::gaussian_kernel:
      return "gaussian_kernel";
  }
  return "none";
}

WnTestResult max_corr_stat(std::span<const double> series, std::size_t p, std::size_t L) {
  return fit_and_measure(series, p, L).result;
}

ExpansionComponents expansion_terms(const ArFit& fit, const Eigen::MatrixXd& regressors, std::size_t h) {
  const std::size_t m = fit.m();
  if (h < 1) throw ValidationError("expansion lag must be at least 1");
  if (h >= m) throw ValidationError("lag exceeds sample");
  if (static_cast<std::size_t>(regressors.rows()) != m ||
      static_cast<std::size_t>(regressors.cols()) != fit.p + 1) {
    throw ValidationError("regressor matrix does not match the fit");
  }
  if (!fit.xtx_inv.allFinite()) throw NumericalError("singular moment matrix");
  if (!(fit.sigma2_eps_hat > 0.0)) throw NumericalError("degenerate residual variance");

  const auto& e = fit.residuals;
  const double md = static_cast<double>(m);
  ExpansionComponents c;
  c.h = h;
  c.sigma2_eps = fit.sigma2_eps_hat;
  c.xtx_inv = fit.xtx_inv;
  c.d_hat = Eigen::VectorXd::Zero(fit.p + 1);
  for (std::size_t t = h; t < m; ++t) {
    c.d_hat -= e[t] * regressors.row(t - h).transpose() + e[t - h] * regressors.row(t).transpose();
  }
  c.d_hat /= md;

  const Eigen::VectorXd g = fit.xtx_inv * c.d_hat;
  const Eigen::VectorXd xg = regressors * g;
  c.z_hat.resize(m - h);
  for (std::size_t t = h; t < m; ++t) {
    c.z_hat[t - h] = (e[t] * e[t - h] + xg[t] * e[t]) / c.sigma2_eps;
  }
  return c;
}

ArpTruth arp_truth(const Eigen::VectorXd& theta0, double innovation_variance, std::size_t L) {
  if (theta0.size() < 1) throw ValidationError("theta0 needs an intercept");
  const std::size_t p = static_cast<std::size_t>(theta0.size()) - 1;
  std::vector<double> phi(theta0.data() + 1, theta0.data() + theta0.size());
  for (double m : ar_root_moduli(phi)) {
    if (!(m > 1.0 + 1e-8)) throw NumericalError("nonstationary coefficient vector");
  }
  const double s2 = innovation_variance;

  double phi_sum = 0.0;
  for (double v : phi) phi_sum += v;
  const double mean = theta0[0] / (1.0 - phi_sum);

  // Yule-Walker: gamma_k - sum_i phi_i gamma_|k-i| = s2 [k == 0], k = 0..p.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p + 1, p + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
  rhs[0] = s2;
  for (std::size_t k = 0; k <= p; ++k) {
    for (std::size_t i = 1; i <= p; ++i) {
      const std::size_t lag = k > i ? k - i : i - k;
      a(k, lag) -= phi[i - 1];
    }
  }
  const Eigen::VectorXd gamma = a.fullPivLu().solve(rhs);

  ArpTruth truth;
  truth.theta0 = theta0;
  truth.sigma2_eps = s2;
  truth.exx.resize(p + 1, p + 1);
  truth.exx(0, 0) = 1.0;
  for (std::size_t i = 1; i <= p; ++i) {
    truth.exx(0, i) = truth.exx(i, 0) = mean;
    for (std::size_t j = 1; j <= p; ++j) {
      truth.exx(i, j) = gamma[i > j ? i - j : j - i] + mean * mean;
    }
  }

  std::vector<double> psi(L + 1, 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j <= L; ++j) {
    for (std::size_t i = 1; i <= std::min(j, p); ++i) psi[j] += phi[i - 1] * psi[j - i];
  }
  for (std::size_t h = 1; h <= L; ++h) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p + 1);
    for (std::size_t j = 1; j <= std::min(h, p); ++j) d[j] = -psi[h - j] * s2;
    truth.d.push_back(d);
  }
  return truth;
}

ExpansionGap expansion_gap(std::span<const double> series, const ArpTruth& truth, std::size_t p, std::size_t L) {
  if (static_cast<std::size_t>(truth.theta0.size()) != p + 1) throw ValidationError("theta0 does not match p");
  if (truth.d.size() < L) throw ValidationError("truth has fewer D(h) vectors than lags");

  const FittedLags f = fit_and_measure(series, p, L);
  if (!(truth.sigma2_eps > 0.0)) throw ValidationError("true error variance must be positive");
  const std::size_t m = f.fit.m();
  const Eigen::Map<const Eigen::VectorXd> y(series.data() + p, static_cast<Eigen::Index>(m));
  const Eigen::VectorXd eps = y - f.design * truth.theta0;
  const Eigen::MatrixXd exx_inv = truth.exx.ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  const double root_m = std::sqrt(static_cast<double>(m));

  ExpansionGap out;
  out.feasible = f.result.per_lag;
  out.oracle.reserve(L);
  for (std::size_t h = 1; h <= L; ++h) {
    const Eigen::VectorXd xg = f.design * (exx_inv * truth.d[h - 1]);
    double acc = 0.0;
    for (std::size_t t = h; t < m; ++t) {
      acc += (eps[t] * eps[t - h] + xg[t] * eps[t]) / truth.sigma2_eps;
    }
    out.oracle.push_back(acc / root_m);
  }
  out.gap = max_gap(out.feasible, out.oracle);
  out.max_abs_diff = max_abs_diff(out.feasible, out.oracle);
  return out;
}

KernelMatrix estimate_z_kernel(const std::vector<ExpansionComponents>& components, std::size_t bandwidth) {
  if (components.empty()) throw ValidationError("kernel needs at least one lag");
  const std::size_t m = components.front().z_hat.size() + components.front().h;
  for (const auto& c : components) {
    if (c.z_hat.size() + c.h != m) throw ValidationError("expansion components disagree on the sample range");
  }
  const std::size_t L = components.size();
  KernelMatrix k;
  k.bandwidth = bandwidth;
  k.values.resize(L, L);
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = a; b < L; ++b) {
      const std::size_t start = std::max(components[a].h, components[b].h);
      const std::size_t len = m - start;
      std::span<const double> za(components[a].z_hat);
      std::span<const double> zb(components[b].z_hat);
      za = za.last(len);
      zb = zb.last(len);
      const double v = a == b ? long_run_variance(za, bandwidth) : long_run_covariance(za, zb, bandwidth);
      k.values(a, b) = v;
      k.values(b, a) = v;
    }
  }
  return k;
}

std::size_t default_block_length(std::size_t n) {
  const double b = std::floor(std::cbrt(static_cast<double>(n)) + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(b));
}

WnTestResult dwb_pvalue(std::span<const double> series, const WnOptions& options) {
  validate_options(options);
  FittedLags f = fit_and_measure(series, options.p, options.L);
  const std::size_t m = f.fit.m();
  const std::size_t block = options.block_len == 0 ? default_block_length(series.size()) : options.block_len;
  if (block < 1 || block >= m) throw ValidationError("block length must lie in [1, m)");

  // With block-constant multipliers, sum_t z_t xi_t collapses to a dot
  // product of per-block sums with one normal per block.
  const std::size_t nblocks = (m + block - 1) / block;
  std::vector<std::vector<double>> block_sums(options.L, std::vector<double>(nblocks, 0.0));
  for (std::size_t h = 1; h <= options.L; ++h) {
    const ExpansionComponents c = expansion_terms(f.fit, f.design, h);
    for (std::size_t t = h; t < m; ++t) block_sums[h - 1][t / block] += c.z_hat[t - h];
  }

  const double root_m = std::sqrt(static_cast<double>(m));
  std::vector<double> draws(options.reps);
  parallel_for(options.reps, options.threads, [&](std::size_t r) {
    Engine engine = make_engine(options.seed.stream(r));
    StandardNormal normal;
    std::vector<double> xi(nblocks);
    for (double& v : xi) v = normal(engine);
    double best = 0.0;
    for (const auto& sums : block_sums) best = std::max(best, std::fabs(kernels::dot(sums, xi) / root_m));
    draws[r] = best;
  });

  WnTestResult& res = f.result;
  res.method = WnMethod::bootstrap;
  res.block_len = block;
  res.reps = options.reps;
  res.p_value = add_one_pvalue(draws, res.max_stat);
  res.reject = res.p_value < options.level;
  return res;
}

WnTestResult gaussian_kernel_pvalue(std::span<const double> series, const WnOptions& options) {
  validate_options(options);
  FittedLags f = fit_and_measure(series, options.p, options.L);
  const std::size_t m = f.fit.m();
  std::vector<ExpansionComponents> comps;
  for (std::size_t h = 1; h <= options.L; ++h) comps.push_back(expansion_terms(f.fit, f.design, h));
  const std::size_t bw = options.kernel_bandwidth == 0 ? default_bandwidth(m) : options.kernel_bandwidth;
  const KernelMatrix kern = estimate_z_kernel(comps, std::min(bw, m - options.L - 1));

  // Symmetric square root; small negative eigenvalues from the finite-sample
  // estimate are clipped to zero.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kern.values);
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * roots.asDiagonal();

  std::vector<double> draws(options.reps);
  parallel_for(options.reps, options.threads, [&](std::size_t r) {
    Engine engine = make_engine(options.seed.stream(r));
    StandardNormal normal;
    Eigen::VectorXd g(options.L);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal(engine);
    draws[r] = (factor * g).cwiseAbs().maxCoeff();
  });

  WnTestResult& res = f.result;
  res.method = WnMethod::gaussian_kernel;
  res.reps = options.reps;
  res.p_value = add_one_pvalue(draws, res.max_stat);
  res.reject = res.p_value < options.level;
  return res;
}

WnTestResult white_noise_test(std::span<const double> series, const WnOptions& options) {
  switch (options.method) {
    case WnMethod::gaussian_kernel:
      return gaussian_kernel_pvalue(series, options);
    case WnMethod::bootstrap:
    case WnMethod::none:
      break;
  }
  return dwb_pvalue(series, options);
}

}  // namespace maxseq
