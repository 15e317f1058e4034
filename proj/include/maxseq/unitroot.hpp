#pragma once

// Max-type unit-root test over a panel of AR(1) series.
//
// Raw statistic:       T_n(k) = max_{i<=k} |n (phi_i - 1)|
// Adjusted statistic:  per series
//   n (phi_i - 1) - (1/2)(s2_i - s2eps_i) / (n^{-2} sum_t y_{t-1}(i)^2)
// where s2 and s2eps are the long-run and short-run variances of the AR(1)
// residuals. Under the unit-root null each adjusted entry converges to
// (1/2)(W(1)^2 - 1) / int_0^1 W^2, whose max over L_n independent copies
// supplies the critical value.

#include <cstddef>
#include <optional>
#include <vector>

#include "maxseq/core.hpp"

namespace maxseq {

struct SeriesStats {
  std::vector<double> per_series;  // signed entries for series 1..k
  double max_stat = 0.0;
};

/// Simulated draws of a Wiener functional.
struct LimitLawSample {
  std::vector<double> draws;   // in replication order
  std::vector<double> sorted;  // ascending copy of draws
  std::size_t k = 1;
  std::size_t m_steps = 0;
  std::size_t reps = 0;
  double ratio = 1.0;

  /// Type-7 empirical quantile.
  double quantile(double q) const;
};

struct UnitRootResult {
  std::vector<double> per_series;
  double max_stat = 0.0;
  std::size_t L_used = 0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool adjusted = true;
  std::size_t bandwidth = 0;
};

struct UnitRootOptions {
  LagRule rule;
  double level = 0.05;
  std::size_t reps = 10000;
  std::size_t m_steps = 10000;
  RngSeed seed{};
  /// Bartlett bandwidth for the adjustment; default_bandwidth(n) when unset.
  std::optional<std::size_t> bandwidth;
  /// false: raw n(phi - 1) against the limit law with `ratio`.
  bool adjusted = true;
  double ratio = 1.0;
  int threads = 0;
};

/// n (phi_i - 1) for i < k, n = panel.n().
SeriesStats t_stat_raw(const PanelData& panel, std::size_t k);

/// Adjusted entries for i < k with the given Bartlett bandwidth.
SeriesStats t_stat_adjusted(const PanelData& panel, std::size_t k, std::size_t bandwidth);

/// (1/2)(W(1)^2 - ratio) / int W^2 for one discretised path of m standard
/// normal increments: W(1) = S_m / sqrt(m), int W^2 = m^{-2} sum_j S_j^2.
double wiener_functional(std::span<const double> increments, double ratio);

/// Each draw r (seeded by seed.stream(r)) simulates k independent paths and
/// records max_i |functional_i|.
LimitLawSample simulate_limit_law(std::size_t k, std::size_t m_steps, std::size_t reps, RngSeed seed,
                                  double ratio = 1.0, int threads = 0);

/// Signed functional of a single path per draw; same seeding as
/// simulate_limit_law with k = 1.
LimitLawSample simulate_limit_law_signed(std::size_t m_steps, std::size_t reps, RngSeed seed, double ratio = 1.0,
                                         int threads = 0);

/// Critical value and p-value of `stat` against simulated max draws. The
/// critical value is an order statistic chosen so that
///   stat > critical_value  <=>  p_value < level
/// with p_value = #{draws >= stat} / reps.
struct LimitDecision {
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
};
LimitDecision decide_against(const LimitLawSample& law, double stat, double level);

/// Full test: L = lag_sequence(rule, n), critical values from
/// simulate_limit_law(L, ...).
UnitRootResult unit_root_test(const PanelData& panel, const UnitRootOptions& options);

/// Same, reusing an already simulated limit law (its k must equal L).
UnitRootResult unit_root_test(const PanelData& panel, const UnitRootOptions& options, const LimitLawSample& law);

}  // namespace maxseq
