#include <cstdlib>
#include <cstring>

#include "nhse/kernels.hpp"

namespace nhse::kernels {

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("NHSE_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_table();
  if (avx2_usable()) return *avx2_table();
  return scalar_table();
}

}  // namespace

bool avx2_usable() {
#if defined(__x86_64__) && defined(NHSE_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(NHSE_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace nhse::kernels
