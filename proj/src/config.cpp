#include "maxseq/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace maxseq {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class Section {
 public:
  Section(std::string name, const std::map<std::string, std::string>* values)
      : name_(std::move(name)), values_(values) {}

  bool has(const std::string& key) const { return values_ && values_->count(key); }

  std::string where(const std::string& key) const {
    return name_.empty() ? "'" + key + "'" : "'" + name_ + "." + key + "'";
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? values_->at(key) : fallback;
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_number(key, values_->at(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    return to_count(key, number(key, 0.0));
  }

  std::vector<double> numbers(const std::string& key) const {
    const std::string raw = values_->at(key);
    if (raw.empty() || raw.front() != '[') return {parse_number(key, raw)};
    if (raw.back() != ']') throw ValidationError("unterminated array for " + where(key));
    std::vector<double> out;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (!item.empty()) out.push_back(parse_number(key, item));
    }
    return out;
  }

  std::size_t to_count(const std::string& key, double v) const {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
      throw ValidationError(where(key) + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  }

  void check_keys(const std::set<std::string>& allowed) const {
    if (!values_) return;
    for (const auto& [key, value] : *values_) {
      if (!allowed.count(key)) throw ValidationError("unknown config key " + where(key));
    }
  }

 private:
  double parse_number(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) {
      throw ValidationError("expected a number for " + where(key) + ", got '" + s + "'");
    }
    return v;
  }

  std::string name_;
  const std::map<std::string, std::string>* values_;
};

const std::set<std::string> kTopKeys{"experiment", "seed", "n_grid", "reps", "threads", "output"};
const std::set<std::string> kDgpKeys{"model",     "n",     "k",     "phi",   "dist",          "df",
                                     "dependence", "rho",  "scale", "cross", "factor_weight", "intercept",
                                     "coeffs"};
const std::set<std::string> kTestKeys{"type",      "rule",  "rule_cap", "level", "reps", "m_steps",  "bandwidth",
                                      "block",     "p",     "pair",     "tolerance"};

ErrorSpec parse_errors(const Section& s) {
  ErrorSpec e;
  const std::string dist = s.text("dist", "gaussian");
  if (dist == "gaussian") e.dist = ErrorDist::gaussian;
  else if (dist == "student_t") e.dist = ErrorDist::student_t;
  else throw ValidationError("unknown error distribution '" + dist + "'");
  e.df = s.number("df", 5.0);
  const std::string dep = s.text("dependence", "iid");
  if (dep == "iid") e.dependence = ErrorDependence::iid;
  else if (dep == "ar1") e.dependence = ErrorDependence::ar1;
  else throw ValidationError("unknown error dependence '" + dep + "'");
  e.rho = s.number("rho", 0.0);
  e.scale = s.number("scale", 1.0);
  return e;
}

DgpSpec parse_dgp(const std::string& label, const Section& s, std::optional<std::size_t>& simulate_n) {
  s.check_keys(kDgpKeys);
  if (s.has("n")) simulate_n = s.count("n", 0);
  DgpSpec dgp;
  dgp.label = label;
  const std::string model = s.text("model", "panel");
  if (model == "panel") {
    PanelSpec p;
    p.n = simulate_n.value_or(100);
    p.k = s.count("k", 1);
    p.phis = s.has("phi") ? s.numbers("phi") : std::vector<double>{1.0};
    p.errors = parse_errors(s);
    const std::string cross = s.text("cross", "independent");
    if (cross == "independent") p.cross = CrossDependence::independent;
    else if (cross == "common_factor") p.cross = CrossDependence::common_factor;
    else throw ValidationError("unknown cross dependence '" + cross + "'");
    p.factor_weight = s.number("factor_weight", 0.0);
    p.validate();
    dgp.model = p;
  } else if (model == "arp") {
    ArpSpec a;
    a.intercept = s.number("intercept", 0.0);
    a.coeffs = s.has("coeffs") ? s.numbers("coeffs") : std::vector<double>{};
    a.errors = parse_errors(s);
    try {
      a.validate();
    } catch (const NumericalError& e) {
      throw ValidationError(std::string("dgp '") + label + "': " + e.what());
    }
    dgp.model = a;
  } else {
    throw ValidationError("unknown dgp model '" + model + "'");
  }
  return dgp;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  doc.sections[""];
  std::string current;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("bad section header on line " + std::to_string(lineno));
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ValidationError("empty section name on line " + std::to_string(lineno));
      if (doc.sections.count(current)) throw ValidationError("duplicate section [" + current + "]");
      doc.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("expected key = value on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("missing key on line " + std::to_string(lineno));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    auto& sec = doc.sections[current];
    if (sec.count(key)) throw ValidationError("duplicate key '" + key + "' on line " + std::to_string(lineno));
    sec[key] = value;
  }
  return doc;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const ConfigDocument doc = ConfigDocument::parse(text);
  ExperimentConfig cfg;

  const Section top("", &doc.sections.at(""));
  top.check_keys(kTopKeys);
  const std::string kind = top.text("experiment", "coupling");
  if (kind == "coupling") cfg.kind = ExperimentKind::coupling;
  else if (kind == "expansion") cfg.kind = ExperimentKind::expansion;
  else if (kind == "size_power") cfg.kind = ExperimentKind::size_power;
  else if (kind == "calibrate") cfg.kind = ExperimentKind::calibrate;
  else throw ValidationError("unknown experiment '" + kind + "'");

  if (top.has("seed")) {
    const std::string s = top.text("seed", "0");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("'seed' must be an unsigned integer");
    cfg.seed = RngSeed{v};
  }
  if (top.has("n_grid")) {
    for (double v : top.numbers("n_grid")) cfg.n_grid.push_back(top.to_count("n_grid", v));
  }
  cfg.reps = top.count("reps", 500);
  cfg.threads = static_cast<int>(top.count("threads", 0));
  cfg.output = top.text("output", "");

  for (const auto& [name, values] : doc.sections) {
    if (name == "dgp" || name.rfind("dgp.", 0) == 0) {
      const std::string label = name == "dgp" ? "dgp" : name.substr(4);
      cfg.dgps.push_back(parse_dgp(label, Section(name, &values), cfg.simulate_n));
    } else if (!name.empty() && name != "test") {
      throw ValidationError("unknown config section [" + name + "]");
    }
  }
  // std::map orders "dgp" before "dgp.*", so the plain [dgp] cell comes first.
  if (cfg.dgps.empty()) throw ValidationError("config needs a [dgp] section");

  const auto test_it = doc.sections.find("test");
  const Section test("test", test_it == doc.sections.end() ? nullptr : &test_it->second);
  test.check_keys(kTestKeys);
  const std::string type = test.text("type", "unitroot");
  if (type == "unitroot") cfg.test = TestKind::unitroot;
  else if (type == "whitenoise") cfg.test = TestKind::whitenoise;
  else throw ValidationError("unknown test type '" + type + "'");
  cfg.rule = LagRule::parse(test.text("rule", "power:1:0.25"));
  if (test.has("rule_cap")) cfg.rule.cap = test.count("rule_cap", 0);
  cfg.rule.validate();
  cfg.level = test.number("level", 0.05);
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ValidationError("'test.level' must lie in (0,1)");
  cfg.test_reps = test.count("reps", cfg.test == TestKind::unitroot ? 10000 : 500);
  cfg.m_steps = test.count("m_steps", 10000);
  if (test.has("bandwidth") && test.text("bandwidth", "") != "auto") cfg.bandwidth = test.count("bandwidth", 0);
  if (test.has("block") && test.text("block", "") != "auto") {
    cfg.block_len = test.count("block", 0);
    if (cfg.block_len == 0) throw ValidationError("'test.block' must be positive or \"auto\"");
  }
  cfg.fit_p = test.count("p", 1);
  cfg.pair = parse_coupled_pair(test.text("pair", "means_vs_zero"));
  cfg.tolerance = test.number("tolerance", 0.05);
  if (!(cfg.tolerance >= 0.0)) throw ValidationError("'test.tolerance' must be nonnegative");

  if (cfg.n_grid.empty()) throw ValidationError("config needs a nonempty 'n_grid'");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ValidationError("'n_grid' must be strictly increasing");
  }
  if (cfg.kind == ExperimentKind::coupling && cfg.reps < 50) {
    throw ValidationError("coupling experiments need reps >= 50");
  }
  if (cfg.kind == ExperimentKind::expansion && !std::holds_alternative<ArpSpec>(cfg.dgps.front().model)) {
    throw ValidationError("expansion experiments need an arp [dgp]");
  }
  return cfg;
}

McReport run_experiment(const ExperimentConfig& cfg, int threads) {
  const int workers = threads > 0 ? threads : cfg.threads;
  switch (cfg.kind) {
    case ExperimentKind::coupling: {
      CouplingConfig c;
      c.dgp = cfg.dgps.front();
      c.pair = cfg.pair;
      c.n_grid = cfg.n_grid;
      c.rule = cfg.rule;
      c.reps = cfg.reps;
      c.seed = cfg.seed;
      c.threads = workers;
      return verify_max_coupling(c);
    }
    case ExperimentKind::expansion: {
      ExpansionConfig c;
      c.arp = std::get<ArpSpec>(cfg.dgps.front().model);
      c.n_grid = cfg.n_grid;
      c.rule = cfg.rule;
      c.reps = cfg.reps;
      c.seed = cfg.seed;
      c.threads = workers;
      return verify_expansion(c);
    }
    case ExperimentKind::size_power: {
      SizePowerConfig c;
      c.test = cfg.test;
      c.cells = cfg.dgps;
      c.n_grid = cfg.n_grid;
      c.level = cfg.level;
      c.reps = cfg.reps;
      c.seed = cfg.seed;
      c.threads = workers;
      c.rule = cfg.rule;
      c.limit_reps = cfg.test_reps;
      c.boot_reps = cfg.test_reps;
      c.m_steps = cfg.m_steps;
      c.bandwidth = cfg.bandwidth;
      c.fit_p = cfg.fit_p;
      c.block_len = cfg.block_len;
      return size_power_experiment(c);
    }
    case ExperimentKind::calibrate: {
      CalibrateConfig c;
      c.dgp = cfg.dgps.front();
      c.pair = cfg.pair;
      c.tolerance = cfg.tolerance;
      c.n_grid = cfg.n_grid;
      c.reps = cfg.reps;
      c.seed = cfg.seed;
      c.threads = workers;
      return calibrate_Ln(c);
    }
  }
  throw ValidationError("unknown experiment kind");
}

}  // namespace maxseq
