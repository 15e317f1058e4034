#include "maxseq/dgp.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace maxseq {
namespace {

class InnovationSource {
 public:
  InnovationSource(const ErrorSpec& spec, RngSeed seed)
      : spec_(spec), engine_(make_engine(seed)), student_(spec.dist == ErrorDist::student_t ? spec.df : 5.0) {
    if (spec_.dist == ErrorDist::student_t) t_scale_ = std::sqrt((spec_.df - 2.0) / spec_.df);
  }

  double operator()() {
    if (spec_.dist == ErrorDist::gaussian) return spec_.scale * normal_(engine_);
    return spec_.scale * t_scale_ * student_(engine_);
  }

 private:
  const ErrorSpec& spec_;
  Engine engine_;
  StandardNormal normal_;
  boost::random::student_t_distribution<double> student_;
  double t_scale_ = 1.0;
};

std::size_t error_burn_in(const ErrorSpec& spec) {
  return spec.dependence == ErrorDependence::ar1 ? kErrorBurnIn : 0;
}

std::vector<double> draw_innovations(const ErrorSpec& spec, std::size_t count, RngSeed seed) {
  InnovationSource draw(spec, seed);
  std::vector<double> out(count);
  for (double& v : out) v = draw();
  return out;
}

// Applies the error-process dependence to an innovation sequence and drops
// the burn-in.
std::vector<double> filter_errors(const ErrorSpec& spec, const std::vector<double>& innovations) {
  if (spec.dependence == ErrorDependence::iid) return innovations;
  const std::size_t burn = error_burn_in(spec);
  std::vector<double> out(innovations.size() - burn);
  double e = 0.0;
  for (std::size_t t = 0; t < innovations.size(); ++t) {
    e = spec.rho * e + innovations[t];
    if (t >= burn) out[t - burn] = e;
  }
  return out;
}

}  // namespace

void ErrorSpec::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ValidationError("error scale must be a finite nonnegative number");
  if (dist == ErrorDist::student_t && !(df > 4.0)) throw ValidationError("student_t errors need df > 4");
  if (dependence == ErrorDependence::ar1 && !(std::fabs(rho) < 1.0)) {
    throw ValidationError("ar1 error dependence needs |rho| < 1");
  }
}

void PanelSpec::validate() const {
  if (n < 2) throw ValidationError("panel spec needs n >= 2");
  if (k < 1) throw ValidationError("panel spec needs k >= 1");
  if (phis.size() != 1 && phis.size() != k) throw ValidationError("panel spec needs 1 or k AR roots");
  for (double p : phis) {
    if (!(std::fabs(p) <= 1.0)) throw ValidationError("panel AR roots must satisfy |phi| <= 1");
  }
  if (cross == CrossDependence::common_factor && !(factor_weight >= 0.0 && factor_weight < 1.0)) {
    throw ValidationError("common factor weight must lie in [0,1)");
  }
  errors.validate();
}

std::vector<double> ar_root_moduli(const std::vector<double>& coeffs) {
  const std::size_t p = coeffs.size();
  std::vector<double> out;
  if (p == 0) return out;
  // Roots of 1 - sum phi_j z^j are reciprocals of the companion eigenvalues.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t j = 0; j < p; ++j) companion(0, j) = coeffs[j];
  for (std::size_t j = 1; j < p; ++j) companion(j, j - 1) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  for (Eigen::Index j = 0; j < eig.size(); ++j) {
    const double m = std::abs(eig[j]);
    out.push_back(m == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / m);
  }
  return out;
}

void ArpSpec::validate() const {
  errors.validate();
  if (!std::isfinite(intercept)) throw ValidationError("AR intercept must be finite");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw ValidationError("AR coefficients must be finite");
  }
  for (double m : ar_root_moduli(coeffs)) {
    if (!(m > 1.0 + 1e-8)) throw NumericalError("nonstationary coefficient vector");
  }
}

std::vector<double> simulate_errors(const ErrorSpec& spec, std::size_t n, RngSeed seed) {
  spec.validate();
  if (n < 1) throw ValidationError("simulate_errors needs n >= 1");
  return filter_errors(spec, draw_innovations(spec, n + error_burn_in(spec), seed));
}

PanelData simulate_ar1_panel(const PanelSpec& spec, RngSeed seed) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t k = spec.k;
  const std::size_t eburn = error_burn_in(spec.errors);
  const bool factor = spec.cross == CrossDependence::common_factor && spec.factor_weight > 0.0;

  // Shared innovations are aligned on the final date of every series.
  std::vector<double> shared;
  if (factor) shared = draw_innovations(spec.errors, n + kPanelBurnIn + eburn, seed.stream(~0ULL));

  std::vector<double> values(n * k);
  for (std::size_t i = 0; i < k; ++i) {
    const double phi = spec.phi(i);
    const bool unit_root = phi == 1.0;
    const std::size_t len = unit_root ? n : n + kPanelBurnIn;
    std::vector<double> innov = draw_innovations(spec.errors, len + eburn, seed.stream(i));
    if (factor) {
      Engine select = make_engine(seed.stream(i).stream(1));
      boost::random::uniform_01<double> u01;
      const std::size_t offset = shared.size() - innov.size();
      for (std::size_t t = 0; t < innov.size(); ++t) {
        if (u01(select) < spec.factor_weight) innov[t] = shared[offset + t];
      }
    }
    const std::vector<double> e = filter_errors(spec.errors, innov);

    double* out = values.data() + i * n;
    double y = 0.0;
    const std::size_t burn = len - n;
    for (std::size_t t = 0; t < len; ++t) {
      y = unit_root ? y + e[t] : phi * y + e[t];
      if (t >= burn) out[t - burn] = y;
    }
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back("y" + std::to_string(i + 1));
  return PanelData(n, k, std::move(values), std::move(labels));
}

std::vector<double> simulate_arp(const ArpSpec& spec, std::size_t n, RngSeed seed) {
  spec.validate();
  if (n < 1) throw ValidationError("simulate_arp needs n >= 1");
  const std::size_t p = spec.p();
  const std::vector<double> e = simulate_errors(spec.errors, n + kArpBurnIn, seed);
  const double phi_sum = std::accumulate(spec.coeffs.begin(), spec.coeffs.end(), 0.0);
  const double mean = spec.intercept / (1.0 - phi_sum);

  // history[j] holds y_{t-1-j}
  std::vector<double> history(p, mean);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < e.size(); ++t) {
    double y = spec.intercept + e[t];
    for (std::size_t j = 0; j < p; ++j) y += spec.coeffs[j] * history[j];
    if (p > 0) {
      for (std::size_t j = p - 1; j > 0; --j) history[j] = history[j - 1];
      history[0] = y;
    }
    if (t >= kArpBurnIn) out[t - kArpBurnIn] = y;
  }
  return out;
}

}  // namespace maxseq
