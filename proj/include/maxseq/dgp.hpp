#pragma once

// Simulated panels and AR(p) series for Monte Carlo work.

#include <cstddef>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "maxseq/core.hpp"

namespace maxseq {

using Engine = std::mt19937_64;

/// Engine seeded from a derived stream seed.
inline Engine make_engine(RngSeed seed) { return Engine(seed.master); }

/// Ziggurat standard normal; deterministic for a given engine state on every
/// platform, unlike std::normal_distribution whose algorithm is unspecified.
using StandardNormal = boost::random::normal_distribution<double>;

enum class ErrorDist { gaussian, student_t };
enum class ErrorDependence { iid, ar1 };

/// Innovation law and serial dependence of an error process.
///
/// `scale` is the standard deviation of the innovations (student-t draws are
/// rescaled to unit variance first). Under ar1 dependence the marginal
/// standard deviation is scale / sqrt(1 - rho^2). scale = 0 gives an
/// all-zero process, used to exercise degenerate inputs.
struct ErrorSpec {
  ErrorDist dist = ErrorDist::gaussian;
  double df = 5.0;
  ErrorDependence dependence = ErrorDependence::iid;
  double rho = 0.0;
  double scale = 1.0;

  void validate() const;
};

enum class CrossDependence { independent, common_factor };

/// k AR(1) series y_t(i) = phi_i y_{t-1}(i) + e_t(i); phi = 1 is a unit root.
///
/// Under common_factor each innovation is, independently with probability
/// `factor_weight`, replaced by a draw shared by all series at that date.
/// Each series keeps exactly the marginal law of the independent case while
/// any two series have innovation correlation factor_weight^2.
struct PanelSpec {
  std::size_t n = 100;
  std::size_t k = 1;
  std::vector<double> phis;  // one per series; a single entry is broadcast
  ErrorSpec errors;
  CrossDependence cross = CrossDependence::independent;
  double factor_weight = 0.0;

  double phi(std::size_t i) const { return phis.size() == 1 ? phis[0] : phis.at(i); }
  void validate() const;
};

/// y_t = c + sum_j phi_j y_{t-j} + e_t.
struct ArpSpec {
  double intercept = 0.0;
  std::vector<double> coeffs;  // phi_1..phi_p
  ErrorSpec errors;

  std::size_t p() const { return coeffs.size(); }
  /// Throws NumericalError("nonstationary coefficient vector") unless every
  /// root of 1 - sum phi_j z^j has modulus above 1 + 1e-8.
  void validate() const;
};

inline constexpr std::size_t kErrorBurnIn = 200;
inline constexpr std::size_t kPanelBurnIn = 200;
inline constexpr std::size_t kArpBurnIn = 500;

/// Moduli of the roots of 1 - sum phi_j z^j (empty for p = 0).
std::vector<double> ar_root_moduli(const std::vector<double>& coeffs);

/// Zero-mean error draws of length n; ar1 dependence discards a 200-draw
/// burn-in.
std::vector<double> simulate_errors(const ErrorSpec& spec, std::size_t n, RngSeed seed);

/// Panel with y_0(i) = 0. Unit-root series are the partial sums of their
/// error draws; stationary series discard a 200-observation burn-in. Series i
/// draws its errors from seed.stream(i).
PanelData simulate_ar1_panel(const PanelSpec& spec, RngSeed seed);

/// Stationary AR(p) draw: starts at the process mean, runs 500 burn-in steps
/// driven by the first 500 of simulate_errors(spec.errors, n + 500, seed).
std::vector<double> simulate_arp(const ArpSpec& spec, std::size_t n, RngSeed seed);

}  // namespace maxseq
