#pragma once

// Shared types for the max-statistic tests: panels, lag rules, seeds,
// error classes and the prefix-max primitives every statistic builds on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxseq {

/// Bad input or configuration: detected before any numerical work starts.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data made a computation impossible (zero variance, singular design).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n x k panel of observations, one contiguous column per series, oldest
/// observation first.
class PanelData {
 public:
  PanelData() = default;
  PanelData(std::size_t n, std::size_t k, std::vector<double> column_major,
            std::vector<std::string> labels);

  /// Panel with default labels "y1".."yk".
  static PanelData from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::span<const double> series(std::size_t i) const;
  double at(std::size_t t, std::size_t i) const { return values_[i * n_ + t]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  /// Scales every observation by c.
  PanelData scaled(double c) const;

  friend bool operator==(const PanelData&, const PanelData&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

enum class LagForm { power, log, fixed };

/// Rule for the number of coordinates L_n entering a max statistic.
struct LagRule {
  LagForm form = LagForm::power;
  double c = 1.0;
  double delta = 0.25;
  std::optional<std::size_t> cap;

  void validate() const;

  /// Parses "form:c[:delta]", e.g. "power:1:0.25", "log:2", "fixed:5".
  static LagRule parse(const std::string& text);
  std::string to_string() const;
};

/// L_n for sample size n; always in [1, n-1] and within the cap.
std::size_t lag_sequence(const LagRule& rule, std::size_t n);

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Master seed with a splittable per-stream derivation, so replication r draws
/// the same numbers whatever thread runs it.
struct RngSeed {
  std::uint64_t master = 0;

  RngSeed stream(std::uint64_t index) const;

  friend bool operator==(RngSeed, RngSeed) = default;
};

/// out[j] = max_{i<=j} |values[i]|.
std::vector<double> running_max_abs(std::span<const double> values);

/// max_i |values[i]|.
double max_abs(std::span<const double> values);

/// 1 - exp(-max_i |values[i]|), the bounded transform used as a convergence
/// diagnostic.
double bounded_max_transform(std::span<const double> values);

/// | max|x| - max|y| |; never exceeds max|x - y|.
double max_gap(std::span<const double> x, std::span<const double> y);

/// max_i |x[i] - y[i]|.
double max_abs_diff(std::span<const double> x, std::span<const double> y);

}  // namespace maxseq
