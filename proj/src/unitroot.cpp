#include "maxseq/unitroot.hpp"

#include <algorithm>
#include <cmath>

#include "maxseq/dgp.hpp"
#include "maxseq/estimate.hpp"
#include "maxseq/kernels.hpp"
#include "maxseq/parallel.hpp"

namespace maxseq {
namespace {

void check_width(const PanelData& panel, std::size_t k) {
  if (k < 1) throw ValidationError("statistic needs k >= 1");
  if (k > panel.k()) throw ValidationError("k exceeds the number of series in the panel");
}

double raw_entry(double n, double phi) { return n * (phi - 1.0); }

LimitLawSample finish(LimitLawSample law) {
  law.sorted = law.draws;
  std::sort(law.sorted.begin(), law.sorted.end());
  return law;
}

void check_limit_args(std::size_t m_steps, std::size_t reps, double ratio) {
  if (m_steps < 100) throw ValidationError("limit-law simulation needs m_steps >= 100");
  if (reps < 1) throw ValidationError("limit-law simulation needs reps >= 1");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ValidationError("variance ratio must be positive");
}

}  // namespace

double LimitLawSample::quantile(double q) const {
  if (sorted.empty()) throw ValidationError("empty limit-law sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SeriesStats t_stat_raw(const PanelData& panel, std::size_t k) {
  check_width(panel, k);
  const double n = static_cast<double>(panel.n());
  SeriesStats out;
  out.per_series.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.per_series.push_back(raw_entry(n, ols_ar1_no_intercept(panel.series(i))));
  }
  out.max_stat = max_abs(out.per_series);
  return out;
}

SeriesStats t_stat_adjusted(const PanelData& panel, std::size_t k, std::size_t bandwidth) {
  check_width(panel, k);
  const std::size_t len = panel.n();
  if (bandwidth >= len - 1) throw ValidationError("bandwidth must be below the residual count");
  const double n = static_cast<double>(len);
  SeriesStats out;
  out.per_series.reserve(k);
  std::vector<double> resid(len - 1);
  for (std::size_t i = 0; i < k; ++i) {
    const auto y = panel.series(i);
    const double phi = ols_ar1_no_intercept(y);
    for (std::size_t t = 1; t < len; ++t) resid[t - 1] = y[t] - phi * y[t - 1];
    const VariancePair v = variance_pair(resid, bandwidth);
    const double scaled_moment = kernels::sum_sq(y.first(len - 1)) / (n * n);
    const double correction = 0.5 * (v.sigma2_hat - v.sigma2_eps_hat) / scaled_moment;
    out.per_series.push_back(raw_entry(n, phi) - correction);
  }
  out.max_stat = max_abs(out.per_series);
  return out;
}

double wiener_functional(std::span<const double> increments, double ratio) {
  const std::size_t m = increments.size();
  double s = 0.0;
  double sum_sq = 0.0;
  for (double z : increments) {
    s += z;
    sum_sq += s * s;
  }
  const double md = static_cast<double>(m);
  const double w1_sq = s * s / md;
  const double integral = sum_sq / (md * md);
  return 0.5 * (w1_sq - ratio) / integral;
}

LimitLawSample simulate_limit_law(std::size_t k, std::size_t m_steps, std::size_t reps, RngSeed seed, double ratio,
                                  int threads) {
  if (k < 1) throw ValidationError("limit-law simulation needs k >= 1");
  check_limit_args(m_steps, reps, ratio);
  LimitLawSample law;
  law.k = k;
  law.m_steps = m_steps;
  law.reps = reps;
  law.ratio = ratio;
  law.draws.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Engine engine = make_engine(seed.stream(r));
    StandardNormal normal;
    std::vector<double> incr(m_steps);
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (double& z : incr) z = normal(engine);
      best = std::max(best, std::fabs(wiener_functional(incr, ratio)));
    }
    law.draws[r] = best;
  });
  return finish(std::move(law));
}

LimitLawSample simulate_limit_law_signed(std::size_t m_steps, std::size_t reps, RngSeed seed, double ratio,
                                         int threads) {
  check_limit_args(m_steps, reps, ratio);
  LimitLawSample law;
  law.k = 1;
  law.m_steps = m_steps;
  law.reps = reps;
  law.ratio = ratio;
  law.draws.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Engine engine = make_engine(seed.stream(r));
    StandardNormal normal;
    std::vector<double> incr(m_steps);
    for (double& z : incr) z = normal(engine);
    law.draws[r] = wiener_functional(incr, ratio);
  });
  return finish(std::move(law));
}

LimitDecision decide_against(const LimitLawSample& law, double stat, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0,1)");
  const std::size_t reps = law.sorted.size();
  if (reps == 0) throw ValidationError("empty limit-law sample");
  const double r = static_cast<double>(reps);

  // Largest K with K / reps < level, evaluated with the same division used
  // for the p-value so the two decision routes cannot disagree.
  std::size_t allowed = static_cast<std::size_t>(std::ceil(level * r));
  while (allowed > 0 && static_cast<double>(allowed) / r >= level) --allowed;
  while (allowed + 1 < reps && static_cast<double>(allowed + 1) / r < level) ++allowed;

  const auto first_ge = std::lower_bound(law.sorted.begin(), law.sorted.end(), stat);
  const auto count = static_cast<std::size_t>(law.sorted.end() - first_ge);

  LimitDecision d;
  d.critical_value = law.sorted[reps - allowed - 1];
  d.p_value = static_cast<double>(count) / r;
  d.reject = stat > d.critical_value;
  return d;
}

UnitRootResult unit_root_test(const PanelData& panel, const UnitRootOptions& options) {
  const std::size_t L = lag_sequence(options.rule, panel.n());
  if (L > panel.k()) throw ValidationError("lag rule exceeds panel width");
  const LimitLawSample law = simulate_limit_law(L, options.m_steps, options.reps, options.seed,
                                                options.adjusted ? 1.0 : options.ratio, options.threads);
  return unit_root_test(panel, options, law);
}

UnitRootResult unit_root_test(const PanelData& panel, const UnitRootOptions& options, const LimitLawSample& law) {
  const std::size_t L = lag_sequence(options.rule, panel.n());
  if (L > panel.k()) throw ValidationError("lag rule exceeds panel width");
  if (law.k != L) throw ValidationError("limit-law sample was simulated for a different L");

  UnitRootResult result;
  result.adjusted = options.adjusted;
  result.L_used = L;
  SeriesStats stats;
  if (options.adjusted) {
    result.bandwidth = options.bandwidth.value_or(default_bandwidth(panel.n()));
    stats = t_stat_adjusted(panel, panel.k(), result.bandwidth);
  } else {
    stats = t_stat_raw(panel, panel.k());
  }
  result.per_series = std::move(stats.per_series);
  result.max_stat = max_abs(std::span<const double>(result.per_series).first(L));

  const LimitDecision d = decide_against(law, result.max_stat, options.level);
  result.critical_value = d.critical_value;
  result.p_value = d.p_value;
  result.reject = d.reject;
  return result;
}

}  // namespace maxseq
