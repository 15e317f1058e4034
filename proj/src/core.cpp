#include "maxseq/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "maxseq/kernels.hpp"

namespace maxseq {

PanelData::PanelData(std::size_t n, std::size_t k, std::vector<double> column_major,
                     std::vector<std::string> labels)
    : n_(n), k_(k), values_(std::move(column_major)), labels_(std::move(labels)) {
  if (n_ < 2) throw ValidationError("panel needs at least 2 observations");
  if (k_ < 1) throw ValidationError("panel needs at least 1 series");
  if (values_.size() != n_ * k_) throw ValidationError("panel value count does not match n*k");
  if (labels_.size() != k_) throw ValidationError("panel label count does not match k");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != k_) {
    throw ValidationError("panel labels must be unique");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("panel contains a non-finite value");
  }
}

PanelData PanelData::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw ValidationError("panel needs at least 1 series");
  const std::size_t n = columns.front().size();
  std::vector<double> values;
  values.reserve(n * columns.size());
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != n) throw ValidationError("panel columns differ in length");
    values.insert(values.end(), columns[i].begin(), columns[i].end());
    labels.push_back("y" + std::to_string(i + 1));
  }
  return PanelData(n, columns.size(), std::move(values), std::move(labels));
}

std::span<const double> PanelData::series(std::size_t i) const {
  if (i >= k_) throw std::out_of_range("series index out of range");
  return {values_.data() + i * n_, n_};
}

PanelData PanelData::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return PanelData(n_, k_, std::move(v), labels_);
}

void LagRule::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("lag rule scale c must be positive");
  if (form == LagForm::power && !(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("lag rule exponent delta must lie in (0,1)");
  }
  if (cap && *cap < 1) throw ValidationError("lag rule cap must be positive");
}

LagRule LagRule::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 2) throw ValidationError("lag rule must look like form:c[:delta], got '" + text + "'");

  auto number = [&](const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ValidationError("lag rule has a non-numeric field '" + s + "'");
    }
    return v;
  };

  LagRule rule;
  if (parts[0] == "power") {
    rule.form = LagForm::power;
    if (parts.size() > 3) throw ValidationError("power rule takes form power:c:delta");
    rule.c = number(parts[1]);
    rule.delta = parts.size() == 3 ? number(parts[2]) : 0.25;
  } else if (parts[0] == "log" || parts[0] == "fixed") {
    rule.form = parts[0] == "log" ? LagForm::log : LagForm::fixed;
    if (parts.size() != 2) throw ValidationError(parts[0] + " rule takes form " + parts[0] + ":c");
    rule.c = number(parts[1]);
  } else {
    throw ValidationError("unknown lag rule form '" + parts[0] + "'");
  }
  rule.validate();
  return rule;
}

std::string LagRule::to_string() const {
  std::ostringstream os;
  switch (form) {
    case LagForm::power:
      os << "power:" << c << ":" << delta;
      break;
    case LagForm::log:
      os << "log:" << c;
      break;
    case LagForm::fixed:
      os << "fixed:" << c;
      break;
  }
  if (cap) os << " (cap " << *cap << ")";
  return os.str();
}

std::size_t lag_sequence(const LagRule& rule, std::size_t n) {
  rule.validate();
  if (n < 2) throw ValidationError("lag_sequence needs n >= 2");
  const double nd = static_cast<double>(n);
  // The slack absorbs pow/log rounding at exact integers such as 10000^0.25.
  constexpr double slack = 1e-9;
  double raw = 0.0;
  switch (rule.form) {
    case LagForm::power:
      raw = std::floor(rule.c * std::pow(nd, rule.delta) + slack);
      break;
    case LagForm::log:
      raw = std::floor(rule.c * std::log(nd) + slack);
      break;
    case LagForm::fixed:
      raw = std::round(rule.c);
      break;
  }
  std::size_t L = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  std::size_t upper = n - 1;
  if (rule.cap) upper = std::min(upper, *rule.cap);
  return std::max<std::size_t>(1, std::min(L, upper));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::stream(std::uint64_t index) const {
  return RngSeed{mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

std::vector<double> running_max_abs(std::span<const double> values) {
  if (values.empty()) throw ValidationError("empty sequence");
  std::vector<double> out(values.size());
  kernels::active().running_max_abs(values.data(), out.data(), values.size());
  return out;
}

double max_abs(std::span<const double> values) {
  if (values.empty()) throw ValidationError("empty sequence");
  return kernels::active().max_abs(values.data(), values.size());
}

double bounded_max_transform(std::span<const double> values) {
  // exp(-x) underflows the 1 - exp(-x) difference past x ~ 37; keep the
  // result inside [0, 1) by saturating at the largest double below 1.
  const double a = -std::expm1(-max_abs(values));
  return std::min(a, std::nextafter(1.0, 0.0));
}

double max_gap(std::span<const double> x, std::span<const double> y) {
  return std::fabs(max_abs(x) - max_abs(y));
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("sequences differ in length");
  if (x.empty()) throw ValidationError("empty sequence");
  return kernels::active().max_abs_diff(x.data(), y.data(), x.size());
}

}  // namespace maxseq
