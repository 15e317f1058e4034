#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace testing {

// Small helpers kept independent of the library code under test.

inline std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z;
  std::vector<double> out(n);
  for (auto& v : out) v = z(eng);
  return out;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

inline double lag1_autocorr(const std::vector<double>& v) {
  const double mu = mean(v);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    den += (v[t] - mu) * (v[t] - mu);
    if (t > 0) num += (v[t] - mu) * (v[t - 1] - mu);
  }
  return num / den;
}

// Type-7 quantile.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Normal equations X'X b = X'y assembled in long double and solved by
// Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> normal_equations_ar(const std::vector<double>& y, std::size_t p) {
  const std::size_t d = p + 1;
  std::vector<std::vector<long double>> a(d, std::vector<long double>(d + 1, 0.0L));
  for (std::size_t t = p; t < y.size(); ++t) {
    std::vector<long double> x(d);
    x[0] = 1.0L;
    for (std::size_t j = 1; j <= p; ++j) x[j] = y[t - j];
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) a[r][c] += x[r] * x[c];
      a[r][d] += x[r] * y[t];
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> b(d);
  for (std::size_t r = 0; r < d; ++r) b[r] = static_cast<double>(a[r][d] / a[r][r]);
  return b;
}

// Two-pass mean then sum of squared deviations, both accumulated left to right.
inline double demeaned_variance(const std::vector<double>& x) {
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

}  // namespace testing
