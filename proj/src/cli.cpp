#include "maxseq/cli.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxseq/config.hpp"
#include "maxseq/dgp.hpp"
#include "maxseq/panel_io.hpp"
#include "maxseq/unitroot.hpp"
#include "maxseq/whitenoise.hpp"

namespace maxseq {
namespace {

using Json = nlohmann::ordered_json;

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

void emit_json(const Json& j, const std::string& path) {
  if (!path.empty()) write_text_file(path, j.dump(2) + "\n");
}

// "auto" or a nonnegative integer.
std::optional<std::size_t> auto_or_count(const std::string& flag, const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (text.empty() || pos != text.size() || text.front() == '-') {
    throw ValidationError(flag + " expects \"auto\" or a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct UnitRootArgs {
  std::string in;
  std::string rule = "power:1:0.25";
  std::optional<std::size_t> rule_cap;
  double level = 0.05;
  std::size_t reps = 10000;
  std::size_t m_steps = 10000;
  std::string bandwidth = "auto";
  bool raw = false;
  double ratio = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

struct WhiteNoiseArgs {
  std::string in;
  std::string column;
  std::size_t p = 1;
  std::optional<std::size_t> L;
  std::string rule;
  std::string block = "auto";
  std::size_t reps = 500;
  double level = 0.05;
  std::string method = "bootstrap";
  std::string bandwidth = "auto";
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

struct MonteCarloArgs {
  std::string config;
  std::string out;
  std::string json;
  int threads = 0;
};

struct LimitsArgs {
  std::size_t k = 1;
  std::size_t m_steps = 10000;
  std::size_t reps = 10000;
  double ratio = 1.0;
  std::uint64_t seed = 0;
  bool signed_law = false;
  std::string out;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ExperimentConfig cfg = parse_experiment_config(read_text_file(a.config));
  const RngSeed seed = a.seed ? RngSeed{*a.seed} : cfg.seed;
  const std::size_t n = a.n ? *a.n : cfg.simulate_n.value_or(0);
  if (n < 2) throw ValidationError("simulate needs n >= 2 (--n or dgp.n)");
  const DgpSpec& dgp = cfg.dgps.front();
  PanelData panel;
  if (const auto* ps = std::get_if<PanelSpec>(&dgp.model)) {
    PanelSpec spec = *ps;
    spec.n = n;
    panel = simulate_ar1_panel(spec, seed);
  } else {
    const auto y = simulate_arp(std::get<ArpSpec>(dgp.model), n, seed);
    panel = PanelData::from_columns({y});
  }
  const std::string path = a.out.empty() ? cfg.output : a.out;
  if (path.empty()) {
    out << format_panel_csv(panel);
    return 0;
  }
  save_panel_csv(panel, path);
  out << "simulated " << dgp.label << ": n=" << panel.n() << " k=" << panel.k() << " -> " << path << "\n";
  return 0;
}

int cmd_unitroot(const UnitRootArgs& a, std::ostream& out) {
  const PanelData panel = load_panel_csv(a.in);
  UnitRootOptions opt;
  opt.rule = LagRule::parse(a.rule);
  if (a.rule_cap) opt.rule.cap = *a.rule_cap;
  opt.level = a.level;
  opt.reps = a.reps;
  opt.m_steps = a.m_steps;
  opt.bandwidth = auto_or_count("--bandwidth", a.bandwidth);
  opt.adjusted = !a.raw;
  opt.ratio = a.ratio;
  opt.seed = RngSeed{a.seed};
  opt.threads = a.threads;
  const UnitRootResult r = unit_root_test(panel, opt);

  Json j;
  j["schema_version"] = 1;
  j["test"] = "unitroot";
  j["statistic"] = r.adjusted ? "adjusted" : "raw";
  j["n"] = panel.n();
  j["k"] = panel.k();
  j["rule"] = opt.rule.to_string();
  j["level"] = opt.level;
  j["reps"] = opt.reps;
  j["m_steps"] = opt.m_steps;
  j["seed"] = a.seed;
  j["bandwidth"] = r.bandwidth;
  j["stat"] = number(r.max_stat);
  j["L"] = r.L_used;
  j["critical_value"] = number(r.critical_value);
  j["p_value"] = number(r.p_value);
  j["reject"] = r.reject;
  j["labels"] = std::vector<std::string>(panel.labels().begin(), panel.labels().begin() + r.L_used);
  j["per_series"] = numbers(r.per_series);
  emit_json(j, a.out);

  out << "unitroot: stat=" << r.max_stat << " L=" << r.L_used << " cv=" << r.critical_value
      << " p=" << r.p_value << (r.reject ? " reject" : " do not reject") << " H0 at level " << opt.level << "\n";
  return 0;
}

std::size_t pick_column(const PanelData& panel, const std::string& column) {
  if (column.empty()) return 0;
  const auto& labels = panel.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == column) return i;
  }
  throw ValidationError("no column named '" + column + "'");
}

int cmd_whitenoise(const WhiteNoiseArgs& a, std::ostream& out) {
  const PanelData panel = load_panel_csv(a.in);
  const std::size_t col = pick_column(panel, a.column);
  const auto series = panel.series(col);

  WnOptions opt;
  opt.p = a.p;
  if (a.L && !a.rule.empty()) throw ValidationError("give either --L or --rule, not both");
  if (a.L) {
    opt.L = *a.L;
  } else {
    const LagRule rule = LagRule::parse(a.rule.empty() ? "power:1:0.25" : a.rule);
    opt.L = lag_sequence(rule, panel.n());
  }
  opt.block_len = auto_or_count("--block", a.block).value_or(0);
  if (a.block != "auto" && opt.block_len == 0) throw ValidationError("--block must be positive or \"auto\"");
  opt.reps = a.reps;
  opt.level = a.level;
  if (a.method == "bootstrap") opt.method = WnMethod::bootstrap;
  else if (a.method == "gaussian") opt.method = WnMethod::gaussian_kernel;
  else throw ValidationError("--method must be bootstrap or gaussian");
  opt.kernel_bandwidth = auto_or_count("--bandwidth", a.bandwidth).value_or(0);
  opt.seed = RngSeed{a.seed};
  opt.threads = a.threads;
  const WnTestResult r = white_noise_test(series, opt);

  Json j;
  j["schema_version"] = 1;
  j["test"] = "whitenoise";
  j["column"] = panel.labels()[col];
  j["n"] = panel.n();
  j["p"] = r.p;
  j["method"] = to_string(r.method);
  j["level"] = opt.level;
  j["reps"] = r.reps;
  j["block_len"] = r.block_len;
  j["seed"] = a.seed;
  j["stat"] = number(r.max_stat);
  j["L"] = r.L;
  j["p_value"] = number(r.p_value);
  j["reject"] = r.reject;
  j["per_lag"] = numbers(r.per_lag);
  emit_json(j, a.out);

  out << "whitenoise: stat=" << r.max_stat << " L=" << r.L << " p=" << r.p_value
      << (r.reject ? " reject" : " do not reject") << " H0 at level " << opt.level << "\n";
  return 0;
}

Json report_json(const McReport& report) {
  Json j;
  j["schema_version"] = 1;
  j["experiment"] = report.experiment;
  j["descriptor"] = report.descriptor;
  j["master_seed"] = report.master_seed;
  Json rows = Json::array();
  for (const McRow& r : report.rows) {
    Json row;
    row["cell"] = r.cell;
    row["n"] = r.n;
    row["L"] = r.L;
    row["reps"] = r.reps;
    row["metric"] = r.metric;
    row["median"] = number(r.median);
    row["mean"] = number(r.mean);
    row["q05"] = number(r.q05);
    row["q95"] = number(r.q95);
    row["se"] = number(r.se);
    row["median_se"] = number(r.median_se);
    row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

int cmd_montecarlo(const MonteCarloArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = parse_experiment_config(read_text_file(a.config));
  const McReport report = run_experiment(cfg, a.threads);
  const std::string path = a.out.empty() ? cfg.output : a.out;
  if (path.empty()) {
    out << report.to_csv();
  } else {
    write_text_file(path, report.to_csv());
  }
  if (!a.json.empty()) emit_json(report_json(report), a.json);
  if (!path.empty()) {
    out << "montecarlo " << report.experiment << ": " << report.rows.size() << " rows -> " << path << "\n";
  }
  return 0;
}

int cmd_limits(const LimitsArgs& a, std::ostream& out) {
  const RngSeed seed{a.seed};
  const LimitLawSample law = a.signed_law ? simulate_limit_law_signed(a.m_steps, a.reps, seed, a.ratio, a.threads)
                                          : simulate_limit_law(a.k, a.m_steps, a.reps, seed, a.ratio, a.threads);
  const std::vector<double> probs{0.01, 0.025, 0.05, 0.1, 0.5, 0.9, 0.95, 0.975, 0.99};
  Json j;
  j["schema_version"] = 1;
  j["law"] = a.signed_law ? "signed" : "max_abs";
  j["k"] = law.k;
  j["m_steps"] = law.m_steps;
  j["reps"] = law.reps;
  j["ratio"] = law.ratio;
  j["seed"] = a.seed;
  Json q = Json::array();
  for (double p : probs) q.push_back(Json{{"p", p}, {"value", number(law.quantile(p))}});
  j["quantiles"] = std::move(q);
  emit_json(j, a.out);

  out << "limits (" << (a.signed_law ? "signed" : "max_abs") << ", k=" << law.k << ", reps=" << law.reps
      << "): q05=" << law.quantile(0.05) << " q50=" << law.quantile(0.5) << " q95=" << law.quantile(0.95) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Max-type unit-root and white-noise tests with Monte Carlo tooling", "maxseq"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a panel from a config's [dgp] section and write CSV");
  s->add_option("--config", sim.config, "Config file")->required();
  s->add_option("--n", sim.n, "Sample length (overrides dgp.n)");
  s->add_option("--seed", sim.seed, "Master seed (overrides the config)");
  s->add_option("--out", sim.out, "Output CSV (stdout when omitted)");

  UnitRootArgs ur;
  auto* u = app.add_subcommand("unitroot", "Max-type unit-root test on a CSV panel");
  u->add_option("--in", ur.in, "Input CSV panel")->required();
  u->add_option("--rule", ur.rule, "Width rule form:c[:delta] (power, log, fixed)")->capture_default_str();
  u->add_option("--rule-cap", ur.rule_cap, "Upper bound on L");
  u->add_option("--level", ur.level, "Significance level")->capture_default_str();
  u->add_option("--reps", ur.reps, "Limit-law draws")->capture_default_str();
  u->add_option("--m-steps", ur.m_steps, "Wiener discretisation steps")->capture_default_str();
  u->add_option("--bandwidth", ur.bandwidth, "Bartlett bandwidth: auto or N")->capture_default_str();
  u->add_flag("--raw", ur.raw, "Use n(phi-1) without the long-run variance correction");
  u->add_option("--ratio", ur.ratio, "Variance ratio in the limit law (with --raw)")->capture_default_str();
  u->add_option("--seed", ur.seed, "Seed for the limit-law simulation")->capture_default_str();
  u->add_option("--out", ur.out, "Output JSON");
  u->add_option("--threads", ur.threads, "Worker threads (0: MAXSEQ_THREADS or all cores)");

  WhiteNoiseArgs wn;
  auto* w = app.add_subcommand("whitenoise", "Max-correlation white-noise test on AR(p) residuals");
  w->add_option("--in", wn.in, "Input CSV")->required();
  w->add_option("--column", wn.column, "Column label (first column by default)");
  w->add_option("--p", wn.p, "AR order of the fitted filter")->capture_default_str();
  w->add_option("--L", wn.L, "Number of lags");
  w->add_option("--rule", wn.rule, "Lag rule form:c[:delta], used when --L is absent");
  w->add_option("--block", wn.block, "Bootstrap block length: auto or N")->capture_default_str();
  w->add_option("--reps", wn.reps, "Bootstrap or Gaussian draws")->capture_default_str();
  w->add_option("--level", wn.level, "Significance level")->capture_default_str();
  w->add_option("--method", wn.method, "bootstrap or gaussian")->capture_default_str();
  w->add_option("--bandwidth", wn.bandwidth, "Kernel bandwidth for --method gaussian: auto or N")
      ->capture_default_str();
  w->add_option("--seed", wn.seed, "Seed")->capture_default_str();
  w->add_option("--out", wn.out, "Output JSON");
  w->add_option("--threads", wn.threads, "Worker threads (0: MAXSEQ_THREADS or all cores)");

  MonteCarloArgs mc;
  auto* m = app.add_subcommand("montecarlo", "Run a Monte Carlo experiment from a config file");
  m->add_option("--config", mc.config, "Config file")->required();
  m->add_option("--out", mc.out, "Output CSV report (config 'output' or stdout when omitted)");
  m->add_option("--json", mc.json, "Also write the report as JSON");
  m->add_option("--threads", mc.threads, "Worker threads (overrides the config)");

  LimitsArgs lim;
  auto* l = app.add_subcommand("limits", "Simulate the unit-root limit law and print quantiles");
  l->add_option("--k", lim.k, "Number of independent Wiener paths per draw")->capture_default_str();
  l->add_option("--m-steps", lim.m_steps, "Discretisation steps")->capture_default_str();
  l->add_option("--reps", lim.reps, "Draws")->capture_default_str();
  l->add_option("--ratio", lim.ratio, "Variance ratio")->capture_default_str();
  l->add_option("--seed", lim.seed, "Seed")->capture_default_str();
  l->add_flag("--signed", lim.signed_law, "Signed single-path functional instead of max |.|");
  l->add_option("--out", lim.out, "Output JSON");
  l->add_option("--threads", lim.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out);
    if (u->parsed()) return cmd_unitroot(ur, out);
    if (w->parsed()) return cmd_whitenoise(wn, out);
    if (m->parsed()) return cmd_montecarlo(mc, out);
    return cmd_limits(lim, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace maxseq
