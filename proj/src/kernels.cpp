#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace oscswap::simd {

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", scalar::scale_row, scalar::sum_abs2,
                                 scalar::weighted_abs2, scalar::rk4_batch};
  return table;
}

const KernelTable* avx2_kernels() {
#if defined(OSCSWAP_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{"avx2", avx2::scale_row, avx2::sum_abs2, avx2::weighted_abs2,
                                 avx2::rk4_batch};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("OSCSWAP_SIMD");
    const std::string_view want = env ? env : "auto";
    if (want == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace oscswap::simd
