#pragma once

// Experiment configuration files: a small TOML subset with top-level keys,
// [section] headers, `key = value` lines, "strings", numbers, true/false,
// flat numeric arrays and # comments.
//
//   experiment = "coupling"     # coupling | expansion | size_power | calibrate
//   seed = 42
//   n_grid = [100, 10000]
//   reps = 500                  # Monte Carlo replications per grid point
//   threads = 0                 # optional; 0 = MAXSEQ_THREADS or all cores
//   output = "report.csv"       # optional default for --out
//
//   [dgp]                       # more cells: [dgp.<label>]
//   model = "panel"             # panel | arp
//   n = 500                     # used by `simulate`
//   k = 10
//   phi = 1.0                   # or one entry per series: [0.9, 1, 1]
//   dist = "gaussian"           # gaussian | student_t
//   df = 5
//   dependence = "iid"          # iid | ar1
//   rho = 0.5
//   scale = 1.0
//   cross = "independent"       # independent | common_factor
//   factor_weight = 0.3
//   intercept = 0.0             # arp only
//   coeffs = [0.5]              # arp only
//
//   [test]
//   type = "unitroot"           # unitroot | whitenoise (size_power)
//   rule = "power:1:0.25"
//   rule_cap = 10
//   level = 0.05
//   reps = 10000                # limit-law draws or bootstrap replications
//   m_steps = 10000
//   bandwidth = "auto"
//   block = "auto"
//   p = 1                       # AR order of the white-noise filter
//   pair = "means_vs_zero"      # coupling / calibrate
//   tolerance = 0.05            # calibrate; "inf" allowed

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxseq/mcharness.hpp"

namespace maxseq {

/// Raw parsed file: section name ("" for top level) -> key -> value text.
/// String values are stored unquoted; arrays keep their brackets.
struct ConfigDocument {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigDocument parse(const std::string& text);
};

enum class ExperimentKind { coupling, expansion, size_power, calibrate };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::coupling;
  std::vector<DgpSpec> dgps;
  std::optional<std::size_t> simulate_n;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 500;
  RngSeed seed{};
  int threads = 0;
  std::string output;

  TestKind test = TestKind::unitroot;
  LagRule rule;
  double level = 0.05;
  std::size_t test_reps = 10000;
  std::size_t m_steps = 10000;
  std::optional<std::size_t> bandwidth;
  std::size_t block_len = 0;
  std::size_t fit_p = 1;
  CoupledPair pair = CoupledPair::means_vs_zero;
  double tolerance = 0.05;
};

/// Parses and validates every field; throws ValidationError naming the key.
ExperimentConfig parse_experiment_config(const std::string& text);

/// Runs the configured experiment; `threads` > 0 overrides the file.
McReport run_experiment(const ExperimentConfig& config, int threads = 0);

}  // namespace maxseq
