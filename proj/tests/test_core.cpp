#include <doctest.h>

#include <cmath>
#include <random>

#include "maxseq/core.hpp"
#include "support.hpp"

using namespace maxseq;

TEST_SUITE("core") {
  TEST_CASE("lag_sequence rules") {
    CHECK(lag_sequence(LagRule{LagForm::power, 1.0, 0.25, std::nullopt}, 10000) == 10);
    CHECK(lag_sequence(LagRule{LagForm::log, 2.0, 0.25, std::nullopt}, 20) == 5);
    CHECK(lag_sequence(LagRule{LagForm::power, 1.0, 0.25, 3}, 16) == 2);
    CHECK(lag_sequence(LagRule{LagForm::power, 1.0, 0.25, 3}, 100000000) == 3);
    CHECK(lag_sequence(LagRule{LagForm::fixed, 5.0, 0.25, std::nullopt}, 100) == 5);
    // never exceeds n - 1 and never drops below 1
    CHECK(lag_sequence(LagRule{LagForm::fixed, 50.0, 0.25, std::nullopt}, 10) == 9);
    CHECK(lag_sequence(LagRule{LagForm::log, 0.1, 0.25, std::nullopt}, 3) == 1);
  }

  TEST_CASE("lag_sequence is nondecreasing in n") {
    for (const char* text : {"power:1:0.25", "power:2:0.5", "log:1", "log:3", "fixed:4"}) {
      const LagRule rule = LagRule::parse(text);
      std::size_t prev = 0;
      for (std::size_t n = 2; n <= 5000; ++n) {
        const std::size_t L = lag_sequence(rule, n);
        CHECK(L >= prev);
        prev = L;
      }
    }
  }

  TEST_CASE("LagRule parsing") {
    const LagRule r = LagRule::parse("power:1:0.25");
    CHECK(r.form == LagForm::power);
    CHECK(r.c == 1.0);
    CHECK(r.delta == 0.25);
    CHECK(LagRule::parse(r.to_string()).to_string() == r.to_string());
    CHECK(LagRule::parse("log:2").form == LagForm::log);
    CHECK_THROWS_AS(LagRule::parse("cubic:1"), ValidationError);
    CHECK_THROWS_AS(LagRule::parse("power:-1:0.25"), ValidationError);
    CHECK_THROWS_AS(LagRule::parse("power:1:1.5"), ValidationError);
    CHECK_THROWS_AS(LagRule::parse("power"), ValidationError);
    CHECK_THROWS_AS(LagRule::parse("power:x"), ValidationError);
  }

  TEST_CASE("running_max_abs examples") {
    CHECK(running_max_abs(std::vector<double>{0.5, -2, 1}) == std::vector<double>{0.5, 2, 2});
    CHECK(running_max_abs(std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0, 0});
    CHECK(running_max_abs(std::vector<double>{1, -3, 2}) == std::vector<double>{1, 3, 3});
    CHECK_THROWS_WITH_AS(running_max_abs(std::vector<double>{}), "empty sequence", ValidationError);
    CHECK_THROWS_AS(max_abs(std::vector<double>{}), ValidationError);
  }

  TEST_CASE("running_max_abs is nondecreasing and ends at max_abs") {
    std::mt19937_64 eng(11);
    std::uniform_int_distribution<std::size_t> len(1, 300);
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = testing::normals(len(eng), 100 + trial);
      const auto r = running_max_abs(x);
      for (std::size_t j = 1; j < r.size(); ++j) CHECK(r[j] >= r[j - 1]);
      CHECK(r.back() == max_abs(x));
    }
  }

  TEST_CASE("bounded_max_transform") {
    CHECK(bounded_max_transform(std::vector<double>{0.0}) == 0.0);
    CHECK(bounded_max_transform(std::vector<double>{std::log(2.0), -std::log(2.0)}) == doctest::Approx(0.5).epsilon(1e-15));
    const double sat = bounded_max_transform(std::vector<double>{1e6});
    CHECK(sat > 1.0 - 1e-6);
    CHECK(sat < 1.0);
    CHECK_THROWS_AS(bounded_max_transform(std::vector<double>{}), ValidationError);
  }

  TEST_CASE("bounded_max_transform range and dominance") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
      auto x = testing::normals(1 + trial % 40, 7000 + trial);
      for (auto& v : x) v *= std::pow(10.0, 4.0 * u(eng) - 1.0);
      const double a = bounded_max_transform(x);
      CHECK(a >= 0.0);
      CHECK(a < 1.0);
      // |y_i| >= |x_i| coordinatewise
      auto y = x;
      for (auto& v : y) v = (v < 0 ? -1.0 : 1.0) * (std::abs(v) + u(eng));
      CHECK(bounded_max_transform(y) >= a);
    }
  }

  TEST_CASE("triangle bound holds exactly") {
    std::mt19937_64 eng(2024);
    std::uniform_int_distribution<std::size_t> len(1, 100);
    std::uniform_real_distribution<double> scale(-3.0, 3.0);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t n = len(eng);
      auto x = testing::normals(n, 2 * trial);
      auto y = testing::normals(n, 2 * trial + 1);
      const double sx = std::pow(10.0, scale(eng)), sy = std::pow(10.0, scale(eng));
      for (auto& v : x) v *= sx;
      for (auto& v : y) v *= sy;
      CHECK(max_gap(x, y) <= max_abs_diff(x, y));
    }
  }

  TEST_CASE("max_gap and max_abs_diff") {
    const std::vector<double> x{1, -4, 2}, y{0.5, 3, -2};
    CHECK(max_gap(x, y) == 1.0);
    CHECK(max_abs_diff(x, y) == 7.0);
    CHECK_THROWS_AS(max_abs_diff(x, std::vector<double>{1.0}), ValidationError);
  }

  TEST_CASE("seed streams") {
    const RngSeed s{42};
    CHECK(s.stream(0) == RngSeed{42}.stream(0));
    CHECK_FALSE(s.stream(0) == s.stream(1));
    CHECK_FALSE(s.stream(1).stream(0) == s.stream(0).stream(1));
    CHECK_FALSE(RngSeed{1}.stream(0) == RngSeed{2}.stream(0));
  }

  TEST_CASE("PanelData validation and accessors") {
    const PanelData p(3, 2, {1, 2, 3, 4, 5, 6}, {"a", "b"});
    CHECK(p.n() == 3);
    CHECK(p.k() == 2);
    CHECK(p.at(2, 1) == 6.0);
    CHECK(p.series(1)[0] == 4.0);
    CHECK(p.scaled(2.0).at(0, 1) == 8.0);
    CHECK_THROWS_AS(PanelData(1, 1, {1.0}, {"a"}), ValidationError);
    CHECK_THROWS_AS(PanelData(2, 1, {1.0}, {"a"}), ValidationError);
    CHECK_THROWS_AS(PanelData(2, 2, {1, 2, 3, 4}, {"a", "a"}), ValidationError);
    CHECK_THROWS_AS(PanelData(2, 1, {1.0, NAN}, {"a"}), ValidationError);
    CHECK(PanelData::from_columns({{1, 2}, {3, 4}}).labels() == std::vector<std::string>{"y1", "y2"});
  }
}
