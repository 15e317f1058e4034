#include "maxseq/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace maxseq::kernels {
namespace {

constexpr KernelTable kScalar{SimdLevel::scalar,       scalar::dot,
                              scalar::sum,             scalar::max_abs,
                              scalar::max_abs_diff,    scalar::running_max_abs,
                              scalar::subtract_scalar};

#if defined(MAXSEQ_HAVE_AVX2)
constexpr KernelTable kAvx2{SimdLevel::avx2,        avx2::dot,
                            avx2::sum,              avx2::max_abs,
                            avx2::max_abs_diff,     avx2::running_max_abs,
                            avx2::subtract_scalar};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
  const char* env = std::getenv("MAXSEQ_SIMD");
  const std::string wanted = env ? env : "";
  if (wanted == "scalar") return kScalar;
  if (const KernelTable* t = table_for(SimdLevel::avx2)) return *t;
  return kScalar;
}

}  // namespace

const KernelTable* table_for(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return &kScalar;
    case SimdLevel::avx2:
#if defined(MAXSEQ_HAVE_AVX2)
      if (cpu_has_avx2()) return &kAvx2;
#endif
      return nullptr;
  }
  return nullptr;
}

namespace {
std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&select()};
  return table;
}
}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool set_active(SimdLevel level) {
  const KernelTable* t = table_for(level);
  if (!t) return false;
  current().store(t, std::memory_order_release);
  return true;
}

std::string_view level_name(SimdLevel level) {
  return level == SimdLevel::avx2 ? "avx2" : "scalar";
}

}  // namespace maxseq::kernels
