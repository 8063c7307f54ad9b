#include <cstdlib>
#include <cstring>

#include "bmc/kernels.hpp"

namespace bmc::kernels {

#if defined(BMC_BUILD_AVX2)
const Table* avx2_table_impl();
#endif

const Table* avx2() {
#if defined(BMC_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* env = std::getenv("BMC_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar();
    if (const Table* t = avx2()) return *t;
    return scalar();
  }();
  return chosen;
}

}  // namespace bmc::kernels
