#pragma once

#include <cstddef>

namespace maxseq::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void running_max_abs(const double* in, double* out, std::size_t n);
void subtract_scalar(const double* a, double c, double* out, std::size_t n);
}  // namespace scalar

#if defined(MAXSEQ_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void running_max_abs(const double* in, double* out, std::size_t n);
void subtract_scalar(const double* a, double c, double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace maxseq::kernels
