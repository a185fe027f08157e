#include <cstdlib>
#include <string_view>

#include "jod/kernels.hpp"

namespace jod::kernels {

bool vector_supported() {
#if defined(JOD_HAVE_AVX2_KERNELS)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#elif defined(JOD_HAVE_NEON_KERNELS)
  return true;  // Advanced SIMD is mandatory on AArch64.
#else
  return false;
#endif
}

namespace {
const KernelTable& select() {
  if (const char* forced = std::getenv("JOD_KERNEL"); forced && std::string_view(forced) == "scalar") {
    return scalar::table();
  }
  if (vector_supported()) {
#if defined(JOD_HAVE_AVX2_KERNELS)
    return avx2::table();
#elif defined(JOD_HAVE_NEON_KERNELS)
    return neon::table();
#endif
  }
  return scalar::table();
}
}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace jod::kernels
