#include <doctest.h>

#include <cmath>
#include <vector>

#include "maxseq/dgp.hpp"
#include "maxseq/estimate.hpp"
#include "maxseq/whitenoise.hpp"
#include "support.hpp"

using namespace maxseq;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed, double intercept = 0.0) {
  ArpSpec spec;
  spec.intercept = intercept;
  spec.coeffs = {phi};
  return simulate_arp(spec, n, RngSeed{seed});
}

ArpTruth ar1_truth(double phi, std::size_t L) {
  Eigen::VectorXd theta(2);
  theta << 0.0, phi;
  return arp_truth(theta, 1.0, L);
}

}  // namespace

TEST_SUITE("whitenoise") {
  TEST_CASE("noiseless AR(1) has degenerate residuals") {
    std::vector<double> y{0.0};
    for (int t = 1; t < 60; ++t) y.push_back(0.5 * y.back() + 1.0);
    CHECK_THROWS_WITH_AS(max_corr_stat(y, 1, 3), "degenerate residual variance", NumericalError);
    ArpSpec spec;
    spec.intercept = 1.0;
    spec.coeffs = {0.5};
    spec.errors.scale = 0.0;
    // the fixed-point series is constant, so even the fit is singular
    CHECK_THROWS_AS(max_corr_stat(simulate_arp(spec, 100, RngSeed{}), 1, 3), NumericalError);
    CHECK_THROWS_AS(expansion_gap(y, ar1_truth(0.5, 3), 1, 3), NumericalError);
  }

  TEST_CASE("white noise statistic stays small") {
    int below = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto y = testing::normals(100000, 300 + s);
      const WnTestResult r = max_corr_stat(y, 1, 5);
      below += r.max_stat < 4.5;
      CHECK(r.per_lag.size() == 5);
      CHECK(r.max_stat == max_abs(r.per_lag));
    }
    CHECK(below == 20);
  }

  TEST_CASE("intercept-only fit on AR(1) data is detected") {
    const auto y = ar1(0.8, 2000, 5);
    CHECK(max_corr_stat(y, 0, 5).max_stat > 10.0);
  }

  TEST_CASE("lag validation") {
    const auto y = testing::normals(40, 1);
    CHECK_THROWS_AS(max_corr_stat(y, 1, 0), ValidationError);
    CHECK_THROWS_AS(max_corr_stat(y, 1, 39), ValidationError);
    CHECK_THROWS_AS(max_corr_stat(y, 1, 13), ValidationError);
    CHECK_NOTHROW(max_corr_stat(y, 1, 12));
  }

  TEST_CASE("intercept-only algebra on alternating residuals") {
    std::vector<double> y;
    for (int t = 0; t < 200; ++t) y.push_back(t % 2 ? 4.0 : 6.0);
    const ArFit fit = ols_arp(y, 0);
    const Eigen::MatrixXd x = ar_design(y, 0);
    // even lag: the first and last h residuals cancel, so D(h) = 0 exactly
    const ExpansionComponents c2 = expansion_terms(fit, x, 2);
    CHECK(std::abs(c2.d_hat[0]) < 1e-14);
    for (double z : c2.z_hat) CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
    // odd lag: D(h) is O(1/m) and z_t = e_t e_{t-h} up to that order
    const ExpansionComponents c1 = expansion_terms(fit, x, 1);
    CHECK(std::abs(c1.d_hat[0]) <= 2.0 / 200.0 + 1e-12);
    for (double z : c1.z_hat) CHECK(std::abs(z + 1.0) < 0.02);
    CHECK_THROWS_AS(expansion_terms(fit, x, 200), ValidationError);
  }

  TEST_CASE("z reduces to the correlation term when D vanishes") {
    const auto y = testing::normals(300, 9);
    const ArFit fit = ols_arp(y, 2);
    const Eigen::MatrixXd x = ar_design(y, 2);
    ArFit zeroed = fit;
    zeroed.xtx_inv.setZero();  // kills the plug-in term
    const ExpansionComponents c = expansion_terms(zeroed, x, 3);
    for (std::size_t t = 3; t < fit.m(); ++t) {
      CHECK(c.z_hat[t - 3] == fit.residuals[t] * fit.residuals[t - 3] / fit.sigma2_eps_hat);
    }
  }

  TEST_CASE("D(2) for a true AR(1)") {
    const auto y = ar1(0.5, 100000, 17);
    const ArFit fit = ols_arp(y, 1);
    const ExpansionComponents c = expansion_terms(fit, ar_design(y, 1), 2);
    CHECK(std::abs(c.d_hat[1] + 0.5) < 0.03);
    const ArpTruth truth = ar1_truth(0.5, 3);
    CHECK(truth.d[1][1] == doctest::Approx(-0.5));
    CHECK(truth.d[0][1] == doctest::Approx(-1.0));
    CHECK(truth.d[2][1] == doctest::Approx(-0.25));
    CHECK(truth.d[1][0] == 0.0);
  }

  TEST_CASE("arp_truth moments for AR(2) with intercept") {
    Eigen::VectorXd theta(3);
    theta << 1.0, 0.5, 0.2;
    const ArpTruth t = arp_truth(theta, 2.0, 4);
    const double mu = 1.0 / (1.0 - 0.7);
    const double g0 = 2.0 * (1 - 0.2) / ((1 + 0.2) * ((1 - 0.2) * (1 - 0.2) - 0.25));
    const double g1 = 0.5 * g0 / (1 - 0.2);
    CHECK(t.exx(0, 1) == doctest::Approx(mu));
    CHECK(t.exx(1, 1) == doctest::Approx(g0 + mu * mu));
    CHECK(t.exx(1, 2) == doctest::Approx(g1 + mu * mu));
    // psi_0 = 1, psi_1 = 0.5, psi_2 = 0.45
    CHECK(t.d[2][1] == doctest::Approx(-0.45 * 2.0));
    CHECK(t.d[2][2] == doctest::Approx(-0.5 * 2.0));
  }

  TEST_CASE("expansion matches the feasible statistic in large samples") {
    std::vector<double> diffs;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto y = ar1(0.5, 20000, 40 + s);
      diffs.push_back(expansion_gap(y, ar1_truth(0.5, 5), 1, 5).max_abs_diff);
    }
    CHECK(testing::median(diffs) < 0.1);
  }

  TEST_CASE("expansion gap obeys the triangle bound and vanishes when forced") {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto y = ar1(0.5, 300, 70 + s);
      const ExpansionGap g = expansion_gap(y, ar1_truth(0.5, 5), 1, 5);
      CHECK(g.gap <= g.max_abs_diff);
      CHECK(g.gap == max_gap(g.feasible, g.oracle));

      const ArFit fit = ols_arp(y, 1);
      ArpTruth forced;
      forced.theta0 = fit.theta_hat;
      forced.sigma2_eps = fit.sigma2_eps_hat;
      forced.exx = Eigen::MatrixXd::Identity(2, 2);
      forced.d.assign(5, Eigen::VectorXd::Zero(2));
      CHECK(expansion_gap(y, forced, 1, 5).gap < 1e-12);
    }
  }

  TEST_CASE("kernel matrix") {
    const auto e = testing::normals(100000, 23);
    const ArFit fit = ols_arp(e, 0);
    const Eigen::MatrixXd x = ar_design(e, 0);
    std::vector<ExpansionComponents> comps;
    for (std::size_t h = 1; h <= 4; ++h) comps.push_back(expansion_terms(fit, x, h));
    const KernelMatrix k = estimate_z_kernel(comps, 0);
    for (Eigen::Index h = 0; h < 4; ++h) CHECK(std::abs(k.values(h, h) - 1.0) < 0.05);
    CHECK(k.values.isApprox(k.values.transpose(), 0.0));

    // bandwidth 0 diagonal is the plain demeaned variance of z
    std::vector<double> z = comps[2].z_hat;
    CHECK(k.values(2, 2) == long_run_variance(z, 0));
    const double mu = testing::mean(z);
    double v = 0.0;
    for (double q : z) v += (q - mu) * (q - mu);
    CHECK(k.values(2, 2) == doctest::Approx(v / static_cast<double>(z.size())).epsilon(1e-12));
  }

  TEST_CASE("kernel matrix is symmetric with positive bandwidth") {
    const auto y = ar1(0.3, 800, 2);
    const ArFit fit = ols_arp(y, 1);
    const Eigen::MatrixXd x = ar_design(y, 1);
    std::vector<ExpansionComponents> comps;
    for (std::size_t h = 1; h <= 6; ++h) comps.push_back(expansion_terms(fit, x, h));
    const KernelMatrix k = estimate_z_kernel(comps, 5);
    CHECK(k.values == k.values.transpose());
    for (Eigen::Index h = 0; h < 6; ++h) CHECK(k.values(h, h) >= 0.0);
  }

  TEST_CASE("default block length") {
    CHECK(default_block_length(500) == 7);
    CHECK(default_block_length(1000) == 10);
    CHECK(default_block_length(27) == 3);
    CHECK(default_block_length(2) == 1);
  }

  TEST_CASE("bootstrap p-value contract") {
    const auto y = testing::normals(500, 4);
    WnOptions opt;
    opt.p = 1;
    opt.L = 5;
    opt.reps = 199;
    opt.seed = RngSeed{7};
    const WnTestResult a = dwb_pvalue(y, opt);
    CHECK(a.p_value > 0.0);
    CHECK(a.p_value <= 1.0);
    CHECK(a.p_value >= 1.0 / 200.0);
    CHECK(a.block_len == 7);
    CHECK(a.reject == (a.p_value < opt.level));
    opt.threads = 3;
    const WnTestResult b = dwb_pvalue(y, opt);
    CHECK(a.p_value == b.p_value);
    CHECK(a.per_lag == b.per_lag);

    opt.reps = 0;
    CHECK_THROWS_WITH_AS(dwb_pvalue(y, opt), "no bootstrap draws", ValidationError);
    opt.reps = 10;
    opt.block_len = 499;
    CHECK_THROWS_AS(dwb_pvalue(y, opt), ValidationError);
  }

  TEST_CASE("statistic and p-value are scale invariant") {
    const auto y = ar1(0.2, 400, 12, 0.5);
    std::vector<double> cy(y);
    for (auto& v : cy) v *= 250.0;
    WnOptions opt;
    opt.L = 4;
    opt.reps = 299;
    opt.seed = RngSeed{1};
    const WnTestResult a = dwb_pvalue(y, opt), b = dwb_pvalue(cy, opt);
    CHECK(b.max_stat == doctest::Approx(a.max_stat).epsilon(1e-9));
    CHECK(a.p_value == b.p_value);
  }

  TEST_CASE("strong alternative gets a tiny p-value") {
    WnOptions opt;
    opt.p = 0;
    opt.L = 4;
    opt.reps = 199;
    for (WnMethod m : {WnMethod::bootstrap, WnMethod::gaussian_kernel}) {
      opt.method = m;
      const WnTestResult r = white_noise_test(ar1(0.5, 500, 3), opt);
      CHECK(r.method == m);
      CHECK(r.p_value == doctest::Approx(1.0 / 200.0));
      CHECK(r.reject);
    }
  }

  TEST_CASE("gaussian kernel p-value on white noise") {
    WnOptions opt;
    opt.L = 5;
    opt.reps = 499;
    opt.method = WnMethod::gaussian_kernel;
    int rejections = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
      opt.seed = RngSeed{s};
      const WnTestResult r = white_noise_test(testing::normals(500, 1000 + s), opt);
      CHECK(r.p_value > 0.0);
      CHECK(r.p_value <= 1.0);
      rejections += r.reject;
    }
    CHECK(rejections <= 8);
  }
}
