#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2 version; the active table is picked once at startup from
// the CPU flags. MAXSEQ_SIMD=scalar|avx2 in the environment overrides the
// choice (an unavailable level falls back to scalar).
//
// Reductions in the AVX2 table use four independent accumulators, so sums
// differ from the scalar reference by rounding only. Max/abs kernels are
// exact and agree bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace maxseq::kernels {

enum class SimdLevel { scalar, avx2 };

struct KernelTable {
  SimdLevel level;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  void (*running_max_abs)(const double* in, double* out, std::size_t n);
  // out[i] = a[i] - c
  void (*subtract_scalar)(const double* a, double c, double* out, std::size_t n);
};

/// Table for a specific level, or nullptr if this build/CPU cannot run it.
const KernelTable* table_for(SimdLevel level);

/// The table in use for this process.
const KernelTable& active();

/// Switch the process-wide table. Returns false (and changes nothing) if the
/// level is unavailable. Not meant to be called while kernels are running.
bool set_active(SimdLevel level);

std::string_view level_name(SimdLevel level);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

inline double sum_sq(std::span<const double> a) {
  return active().dot(a.data(), a.data(), a.size());
}

}  // namespace maxseq::kernels
