#include "uncoded/kernels.hpp"

namespace uncoded {

namespace {

bool have_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

BcGroupFn bc_group_fn() {
#if defined(__x86_64__) || defined(_M_X64)
  if (have_avx2()) return bc_group_avx2;
#endif
  return bc_group_scalar;
}

MacGroupFn mac_group_fn() {
#if defined(__x86_64__) || defined(_M_X64)
  if (have_avx2()) return mac_group_avx2;
#endif
  return mac_group_scalar;
}

const char* kernel_backend() { return have_avx2() ? "avx2" : "scalar"; }

}  // namespace uncoded
