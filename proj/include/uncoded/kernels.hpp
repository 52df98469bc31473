#pragma once

// Batch accumulation kernels for the Monte Carlo paths. A group is kLanes
// consecutive samples laid out lane-major (value[j * kLanes + lane]). The
// scalar kernels are the reference; the AVX2 variants must produce
// bit-identical accumulator updates (mul/add only, no FMA, same operation
// order per lane) and are selected at runtime.

#include <cstddef>

namespace uncoded {

inline constexpr std::size_t kLanes = 4;
inline constexpr std::size_t kBlock = 32;   // samples per accumulation block
inline constexpr std::size_t kMaxDim = 64;  // largest supported signal dimension

struct BcKernelInput {
  std::size_t m = 0;
  const double* mix = nullptr;       // m x m row-major source factor, s = mix z
  const double* alpha = nullptr;     // m
  const double* gain = nullptr;      // m decoder gains
  const double* noise_sd = nullptr;  // m
};

struct MacKernelInput {
  std::size_t m = 0, l = 0;
  const double* mix = nullptr;    // (m+l) x (m+l) joint factor, (s; t) = mix z
  const double* coeff = nullptr;  // l: x_l = coeff_l t_l
  const double* delta = nullptr;  // l
  const double* gain = nullptr;   // m decoder gains
  double noise_sd = 0.0;
};

// BC accumulator layout: per component i, [e2 sums | e4 sums] of kLanes each,
// then [x2 sums | x4 sums]. Total (m + 1) * 2 * kLanes doubles.
// zsrc: m x kLanes lane-major source normals; znoise: m x kLanes channel normals.
using BcGroupFn = void (*)(const BcKernelInput&, const double* zsrc,
                           const double* znoise, double* acc);

// MAC accumulator layout: per component i, [e2 | e4]; then per sensor l,
// [x2 | x4]. Total (m + l) * 2 * kLanes doubles.
// z: (m + l + 1) x kLanes lane-major normals, last row the channel noise.
using MacGroupFn = void (*)(const MacKernelInput&, const double* z, double* acc);

void bc_group_scalar(const BcKernelInput& in, const double* zsrc,
                     const double* znoise, double* acc);
void mac_group_scalar(const MacKernelInput& in, const double* z, double* acc);

#if defined(__x86_64__) || defined(_M_X64)
void bc_group_avx2(const BcKernelInput& in, const double* zsrc,
                   const double* znoise, double* acc);
void mac_group_avx2(const MacKernelInput& in, const double* z, double* acc);
#endif

// Runtime-dispatched entry points and the name of the selected backend.
BcGroupFn bc_group_fn();
MacGroupFn mac_group_fn();
const char* kernel_backend();

}  // namespace uncoded
