#include "maxseq/mcharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "maxseq/estimate.hpp"
#include "maxseq/parallel.hpp"
#include "maxseq/unitroot.hpp"

namespace maxseq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct RepOutcome {
  std::vector<double> metrics;
  std::string error;
  bool ok = false;
};

// Runs `reps` replications and returns per-replication metric vectors.
// Numerical failures are kept per replication; configuration errors abort.
template <class Fn>
std::vector<RepOutcome> run_reps(std::size_t reps, int threads, Fn fn) {
  std::vector<RepOutcome> out(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    try {
      out[r].metrics = fn(r);
      out[r].ok = true;
    } catch (const NumericalError& e) {
      out[r].error = e.what();
    }
  });
  return out;
}

// One row per metric name, plus an "error" row when replications failed.
void append_rows(McReport& report, const std::string& cell, std::size_t n, std::size_t L,
                 const std::vector<std::string>& names, const std::vector<RepOutcome>& outcomes) {
  std::size_t failures = 0;
  std::string first_error;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      if (failures == 0) first_error = o.error;
      ++failures;
    }
  }
  if (failures > 0) {
    McRow row;
    row.cell = cell;
    row.n = n;
    row.L = L;
    row.reps = failures;
    row.metric = "error";
    row.median = row.mean = row.q05 = row.q95 = row.se = row.median_se = kNaN;
    row.note = first_error;
    report.rows.push_back(row);
  }
  if (failures == outcomes.size()) return;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> values;
    values.reserve(outcomes.size());
    for (const auto& o : outcomes) {
      if (o.ok) values.push_back(o.metrics[j]);
    }
    McRow row = summarize(values);
    row.cell = cell;
    row.n = n;
    row.L = L;
    row.metric = names[j];
    report.rows.push_back(std::move(row));
  }
}

const PanelSpec& panel_of(const DgpSpec& dgp) {
  if (const auto* p = std::get_if<PanelSpec>(&dgp.model)) return *p;
  throw ValidationError("this experiment needs a panel DGP");
}

const ArpSpec& arp_of(const DgpSpec& dgp) {
  if (const auto* a = std::get_if<ArpSpec>(&dgp.model)) return *a;
  throw ValidationError("this experiment needs an AR(p) DGP");
}

Eigen::VectorXd theta_of(const ArpSpec& spec) {
  Eigen::VectorXd theta(spec.p() + 1);
  theta[0] = spec.intercept;
  for (std::size_t j = 0; j < spec.p(); ++j) theta[j + 1] = spec.coeffs[j];
  return theta;
}

void check_grid(const std::vector<std::size_t>& grid) {
  if (grid.empty()) throw ValidationError("n_grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2) throw ValidationError("n_grid entries must be at least 2");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ValidationError("n_grid must be strictly increasing");
  }
}

std::size_t coordinate_count(const DgpSpec& dgp, CoupledPair pair, std::size_t L) {
  return pair == CoupledPair::feasible_vs_oracle ? L : panel_of(dgp).k;
}

void format_number(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  os.write(buf, ptr - buf);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

McRow summarize(const std::vector<double>& values) {
  McRow row;
  row.reps = values.size();
  if (values.empty()) {
    row.median = row.mean = row.q05 = row.q95 = row.se = row.median_se = kNaN;
    return row;
  }
  const double r = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  row.mean = sum / r;
  double ss = 0.0;
  for (double v : values) ss += (v - row.mean) * (v - row.mean);
  row.se = values.size() > 1 ? std::sqrt(ss / (r - 1.0) / r) : 0.0;

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  row.median = sorted_quantile(sorted, 0.5);
  row.q05 = sorted_quantile(sorted, 0.05);
  row.q95 = sorted_quantile(sorted, 0.95);

  // Distribution-free 95% interval for the median from order statistics,
  // converted to a standard error.
  const double half = 0.98 * std::sqrt(r);
  const double lo_pos = std::max(0.0, std::floor(r / 2.0 - half));
  const double hi_pos = std::min(r - 1.0, std::ceil(r / 2.0 + half));
  row.median_se = (sorted[static_cast<std::size_t>(hi_pos)] - sorted[static_cast<std::size_t>(lo_pos)]) / (2.0 * 1.96);
  return row;
}

const McRow& McReport::find(const std::string& metric, std::size_t n, const std::string& cell) const {
  for (const auto& row : rows) {
    if (row.metric == metric && row.n == n && (cell.empty() || row.cell == cell)) return row;
  }
  throw std::out_of_range("no report row for metric " + metric + " at n=" + std::to_string(n));
}

std::string McReport::to_csv() const {
  std::ostringstream os;
  os << "experiment,cell,n,L,reps,metric,median,mean,q05,q95,se,median_se,note\n";
  for (const auto& row : rows) {
    os << csv_field(experiment) << ',' << csv_field(row.cell) << ',' << row.n << ',' << row.L << ',' << row.reps
       << ',' << csv_field(row.metric) << ',';
    for (double v : {row.median, row.mean, row.q05, row.q95, row.se, row.median_se}) {
      format_number(os, v);
      os << ',';
    }
    os << csv_field(row.note) << '\n';
  }
  return os.str();
}

std::string to_string(CoupledPair pair) {
  switch (pair) {
    case CoupledPair::means_vs_zero:
      return "means_vs_zero";
    case CoupledPair::feasible_vs_oracle:
      return "feasible_vs_oracle";
    case CoupledPair::raw_vs_adjusted:
      return "raw_vs_adjusted";
  }
  return "means_vs_zero";
}

CoupledPair parse_coupled_pair(const std::string& text) {
  if (text == "means_vs_zero") return CoupledPair::means_vs_zero;
  if (text == "feasible_vs_oracle") return CoupledPair::feasible_vs_oracle;
  if (text == "raw_vs_adjusted") return CoupledPair::raw_vs_adjusted;
  throw ValidationError("unknown coupled pair '" + text + "'");
}

CoupledDraw draw_coupled_pair(const DgpSpec& dgp, CoupledPair pair, std::size_t n, std::size_t L, RngSeed seed) {
  CoupledDraw d;
  switch (pair) {
    case CoupledPair::means_vs_zero: {
      PanelSpec spec = panel_of(dgp);
      spec.n = n;
      const PanelData panel = simulate_ar1_panel(spec, seed);
      for (std::size_t i = 0; i < panel.k(); ++i) {
        double s = 0.0;
        for (double v : panel.series(i)) s += v;
        d.x.push_back(s / static_cast<double>(n));
      }
      d.y.assign(d.x.size(), 0.0);
      break;
    }
    case CoupledPair::raw_vs_adjusted: {
      PanelSpec spec = panel_of(dgp);
      spec.n = n;
      const PanelData panel = simulate_ar1_panel(spec, seed);
      d.x = t_stat_raw(panel, panel.k()).per_series;
      d.y = t_stat_adjusted(panel, panel.k(), default_bandwidth(n)).per_series;
      break;
    }
    case CoupledPair::feasible_vs_oracle: {
      const ArpSpec& spec = arp_of(dgp);
      if (spec.errors.dependence != ErrorDependence::iid) {
        throw ValidationError("feasible_vs_oracle needs iid errors (the oracle uses white-noise moments)");
      }
      const std::vector<double> series = simulate_arp(spec, n, seed);
      const ArpTruth truth = arp_truth(theta_of(spec), spec.errors.scale * spec.errors.scale, L);
      ExpansionGap g = expansion_gap(series, truth, spec.p(), L);
      d.x = std::move(g.feasible);
      d.y = std::move(g.oracle);
      break;
    }
  }
  return d;
}

McReport verify_max_coupling(const CouplingConfig& config) {
  check_grid(config.n_grid);
  if (config.reps < 50) throw ValidationError("coupling experiments need reps >= 50");
  std::visit([](const auto& m) { m.validate(); }, config.dgp.model);

  McReport report;
  report.experiment = "coupling";
  report.descriptor = "pair=" + to_string(config.pair) + " rule=" + config.rule.to_string();
  report.master_seed = config.seed.master;
  for (std::size_t n : config.n_grid) {
    const std::size_t L = lag_sequence(config.rule, n);
    if (L > coordinate_count(config.dgp, config.pair, L)) throw ValidationError("lag rule exceeds panel width");
    const RngSeed base = config.seed.stream(0).stream(n);
    const auto outcomes = run_reps(config.reps, config.threads, [&](std::size_t r) {
      const CoupledDraw d = draw_coupled_pair(config.dgp, config.pair, n, L, base.stream(r));
      const std::span<const double> x = std::span<const double>(d.x).first(L);
      const std::span<const double> y = std::span<const double>(d.y).first(L);
      std::vector<double> diff(L);
      for (std::size_t i = 0; i < L; ++i) diff[i] = x[i] - y[i];
      return std::vector<double>{max_gap(x, y), max_abs_diff(x, y), max_abs(x), bounded_max_transform(diff)};
    });
    append_rows(report, config.dgp.label, n, L, {"max_gap", "max_abs_diff", "max_abs_x", "A_kn"}, outcomes);
  }
  return report;
}

McReport verify_expansion(const ExpansionConfig& config) {
  check_grid(config.n_grid);
  if (config.reps < 1) throw ValidationError("expansion experiment needs reps >= 1");
  config.arp.validate();
  const DgpSpec dgp{"arp", config.arp};

  McReport report;
  report.experiment = "expansion";
  report.descriptor = "rule=" + config.rule.to_string();
  report.master_seed = config.seed.master;
  for (std::size_t n : config.n_grid) {
    const std::size_t L = lag_sequence(config.rule, n);
    const RngSeed base = config.seed.stream(0).stream(n);
    const auto outcomes = run_reps(config.reps, config.threads, [&](std::size_t r) {
      const CoupledDraw d = draw_coupled_pair(dgp, CoupledPair::feasible_vs_oracle, n, L, base.stream(r));
      return std::vector<double>{max_gap(d.x, d.y), max_abs_diff(d.x, d.y)};
    });
    append_rows(report, dgp.label, n, L, {"expansion_gap", "max_abs_diff"}, outcomes);
  }
  return report;
}

McReport size_power_experiment(const SizePowerConfig& config) {
  check_grid(config.n_grid);
  if (config.cells.empty()) throw ValidationError("size/power experiment needs at least one DGP cell");
  if (config.reps < 1) throw ValidationError("size/power experiment needs reps >= 1");
  if (!(config.level > 0.0 && config.level < 1.0)) throw ValidationError("level must lie in (0,1)");
  for (const auto& cell : config.cells) {
    std::visit([](const auto& m) { m.validate(); }, cell.model);
    if (config.test == TestKind::unitroot) panel_of(cell);
    else arp_of(cell);
  }

  McReport report;
  report.experiment = "size_power";
  report.descriptor = std::string("test=") + (config.test == TestKind::unitroot ? "unitroot" : "whitenoise") +
                      " rule=" + config.rule.to_string();
  report.master_seed = config.seed.master;

  for (std::size_t n : config.n_grid) {
    const std::size_t L = lag_sequence(config.rule, n);
    std::optional<LimitLawSample> law;
    if (config.test == TestKind::unitroot) {
      law = simulate_limit_law(L, config.m_steps, config.limit_reps, config.seed.stream(~0ULL).stream(n), 1.0,
                               config.threads);
    }
    for (std::size_t c = 0; c < config.cells.size(); ++c) {
      const DgpSpec& cell = config.cells[c];
      const RngSeed base = config.seed.stream(c).stream(n);
      std::vector<RepOutcome> outcomes;
      if (config.test == TestKind::unitroot) {
        PanelSpec spec = panel_of(cell);
        spec.n = n;
        if (L > spec.k) throw ValidationError("lag rule exceeds panel width");
        UnitRootOptions opts;
        opts.rule = config.rule;
        opts.level = config.level;
        opts.bandwidth = config.bandwidth;
        outcomes = run_reps(config.reps, config.threads, [&](std::size_t r) {
          const PanelData panel = simulate_ar1_panel(spec, base.stream(r));
          const UnitRootResult res = unit_root_test(panel, opts, *law);
          return std::vector<double>{res.reject ? 1.0 : 0.0, res.max_stat};
        });
      } else {
        const ArpSpec& spec = arp_of(cell);
        WnOptions opts;
        opts.p = config.fit_p;
        opts.L = L;
        opts.block_len = config.block_len;
        opts.reps = config.boot_reps;
        opts.level = config.level;
        opts.threads = 1;
        outcomes = run_reps(config.reps, config.threads, [&](std::size_t r) {
          const std::vector<double> series = simulate_arp(spec, n, base.stream(r).stream(0));
          WnOptions local = opts;
          local.seed = base.stream(r).stream(1);
          const WnTestResult res = dwb_pvalue(series, local);
          return std::vector<double>{res.reject ? 1.0 : 0.0, res.max_stat};
        });
      }
      const std::size_t before = report.rows.size();
      append_rows(report, cell.label, n, L, {"rejection", "max_stat"}, outcomes);
      for (std::size_t i = before; i < report.rows.size(); ++i) {
        McRow& row = report.rows[i];
        if (row.metric == "rejection") {
          row.se = std::sqrt(row.mean * (1.0 - row.mean) / static_cast<double>(row.reps));
        }
      }
    }
  }
  return report;
}

McReport calibrate_Ln(const CalibrateConfig& config) {
  check_grid(config.n_grid);
  if (config.reps < 1) throw ValidationError("calibration needs reps >= 1");
  if (!(config.tolerance >= 0.0)) throw ValidationError("tolerance must be nonnegative");
  if (config.pair == CoupledPair::feasible_vs_oracle) {
    throw ValidationError("calibration works on panel pairs (means_vs_zero, raw_vs_adjusted)");
  }
  const PanelSpec& panel = panel_of(config.dgp);
  panel.validate();
  const std::size_t k = panel.k;

  McReport report;
  report.experiment = "calibrate";
  report.descriptor = "pair=" + to_string(config.pair) + " tolerance=" + std::to_string(config.tolerance);
  report.master_seed = config.seed.master;
  for (std::size_t n : config.n_grid) {
    const RngSeed base = config.seed.stream(0).stream(n);
    const auto outcomes = run_reps(config.reps, config.threads, [&](std::size_t r) {
      const CoupledDraw d = draw_coupled_pair(config.dgp, config.pair, n, k, base.stream(r));
      const std::vector<double> mx = running_max_abs(d.x);
      const std::vector<double> my = running_max_abs(d.y);
      std::vector<double> gaps(k);
      for (std::size_t L = 0; L < k; ++L) gaps[L] = std::fabs(mx[L] - my[L]);
      return gaps;
    });

    std::vector<std::string> names;
    for (std::size_t L = 1; L <= k; ++L) names.push_back("gap_L" + std::to_string(L));
    McReport scratch;
    append_rows(scratch, config.dgp.label, n, 0, names, outcomes);

    std::size_t l_hat = 0;
    bool failed = false;
    for (const auto& row : scratch.rows) {
      if (row.metric == "error") {
        failed = true;
        report.rows.push_back(row);
        continue;
      }
      const std::size_t L = std::stoul(row.metric.substr(5));
      if (row.median <= config.tolerance) l_hat = std::max(l_hat, L);
    }
    if (failed && scratch.rows.size() == 1) continue;

    McRow row;
    row.cell = config.dgp.label;
    row.n = n;
    row.L = l_hat;
    row.reps = config.reps;
    row.metric = "L_hat";
    row.median = row.mean = row.q05 = row.q95 = static_cast<double>(l_hat);
    row.se = row.median_se = 0.0;
    if (l_hat == 0) row.note = "none";
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace maxseq
