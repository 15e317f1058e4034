#pragma once

// Monte Carlo experiments that check the max-statistic convergence results at
// desk scale. Every replication r of grid point n draws from
// seed.stream(cell).stream(n).stream(r), results are stored per replication
// and summarised after sorting, so reports are bitwise reproducible for any
// thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maxseq/core.hpp"
#include "maxseq/dgp.hpp"
#include "maxseq/whitenoise.hpp"

namespace maxseq {

struct McRow {
  std::string cell;
  std::size_t n = 0;
  std::size_t L = 0;
  std::size_t reps = 0;
  std::string metric;
  double median = 0.0;
  double mean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double se = 0.0;         // standard error of the mean
  double median_se = 0.0;  // order-statistic standard error of the median
  std::string note;
};

struct McReport {
  std::string experiment;
  std::string descriptor;
  std::uint64_t master_seed = 0;
  std::vector<McRow> rows;

  /// First row matching (cell, n, metric); throws if absent.
  const McRow& find(const std::string& metric, std::size_t n, const std::string& cell = "") const;
  std::string to_csv() const;
};

/// Distribution summary of one metric across replications.
McRow summarize(const std::vector<double>& values);

struct DgpSpec {
  std::string label = "dgp";
  std::variant<PanelSpec, ArpSpec> model;
};

enum class CoupledPair { means_vs_zero, feasible_vs_oracle, raw_vs_adjusted };

std::string to_string(CoupledPair pair);
CoupledPair parse_coupled_pair(const std::string& text);

struct CouplingConfig {
  DgpSpec dgp;
  CoupledPair pair = CoupledPair::means_vs_zero;
  std::vector<std::size_t> n_grid;
  LagRule rule;
  std::size_t reps = 500;
  RngSeed seed{};
  int threads = 0;
};

/// One replication of a coupled pair: X_n(i), Y_n(i) for every available
/// coordinate (k series, or L lags for feasible_vs_oracle).
struct CoupledDraw {
  std::vector<double> x;
  std::vector<double> y;
};

CoupledDraw draw_coupled_pair(const DgpSpec& dgp, CoupledPair pair, std::size_t n, std::size_t L, RngSeed seed);

/// Per n: max_gap, max_abs_diff, max_abs_x and the A_kn diagnostic
/// 1 - exp(-max_{i<=L}|X - Y|), all over the first L_n coordinates.
McReport verify_max_coupling(const CouplingConfig& config);

struct ExpansionConfig {
  ArpSpec arp;
  std::vector<std::size_t> n_grid;
  LagRule rule{LagForm::fixed, 5.0, 0.25, std::nullopt};
  std::size_t reps = 500;
  RngSeed seed{};
  int threads = 0;
};

/// Per n: expansion_gap and max_abs_diff between the feasible statistic and
/// its true-parameter expansion.
McReport verify_expansion(const ExpansionConfig& config);

enum class TestKind { unitroot, whitenoise };

struct SizePowerConfig {
  TestKind test = TestKind::unitroot;
  std::vector<DgpSpec> cells;
  std::vector<std::size_t> n_grid;
  double level = 0.05;
  std::size_t reps = 1000;
  RngSeed seed{};
  int threads = 0;
  LagRule rule;
  // unit root
  std::size_t limit_reps = 10000;
  std::size_t m_steps = 10000;
  std::optional<std::size_t> bandwidth;
  // white noise
  std::size_t fit_p = 1;
  std::size_t block_len = 0;
  std::size_t boot_reps = 500;
};

/// Per cell and n: rejection rate (mean of the 0/1 decision, binomial SE)
/// and the distribution of the max statistic.
McReport size_power_experiment(const SizePowerConfig& config);

struct CalibrateConfig {
  DgpSpec dgp;
  CoupledPair pair = CoupledPair::means_vs_zero;
  double tolerance = 0.05;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 500;
  RngSeed seed{};
  int threads = 0;
};

/// Per n: L_hat, the largest L <= k whose median coupling gap is within the
/// tolerance (0, noted "none", if even L = 1 fails).
McReport calibrate_Ln(const CalibrateConfig& config);

}  // namespace maxseq
