// AVX2 variants. Only mul/add intrinsics (no FMA), in the same per-lane
// operation order as the scalar reference, so accumulator updates are
// bit-identical. Compiled with -mavx2 and dispatched at runtime.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "uncoded/kernels.hpp"

namespace uncoded {

void bc_group_avx2(const BcKernelInput& in, const double* zsrc,
                   const double* znoise, double* acc) {
  const std::size_t m = in.m;
  __m256d s[kMaxDim];
  for (std::size_t i = 0; i < m; ++i) {
    __m256d v = _mm256_setzero_pd();
    for (std::size_t j = 0; j < m; ++j) {
      const __m256d a = _mm256_set1_pd(in.mix[i * m + j]);
      v = _mm256_add_pd(v, _mm256_mul_pd(a, _mm256_loadu_pd(zsrc + j * kLanes)));
    }
    s[i] = v;
  }
  __m256d x = _mm256_setzero_pd();
  for (std::size_t i = 0; i < m; ++i)
    x = _mm256_add_pd(x, _mm256_mul_pd(_mm256_set1_pd(in.alpha[i]), s[i]));
  const __m256d x2 = _mm256_mul_pd(x, x);
  double* pacc = acc + m * 2 * kLanes;
  _mm256_storeu_pd(pacc, _mm256_add_pd(_mm256_loadu_pd(pacc), x2));
  _mm256_storeu_pd(pacc + kLanes, _mm256_add_pd(_mm256_loadu_pd(pacc + kLanes),
                                                _mm256_mul_pd(x2, x2)));
  for (std::size_t i = 0; i < m; ++i) {
    const __m256d y = _mm256_add_pd(
        x, _mm256_mul_pd(_mm256_set1_pd(in.noise_sd[i]),
                         _mm256_loadu_pd(znoise + i * kLanes)));
    const __m256d e =
        _mm256_sub_pd(s[i], _mm256_mul_pd(_mm256_set1_pd(in.gain[i]), y));
    const __m256d e2 = _mm256_mul_pd(e, e);
    double* a0 = acc + i * 2 * kLanes;
    _mm256_storeu_pd(a0, _mm256_add_pd(_mm256_loadu_pd(a0), e2));
    _mm256_storeu_pd(a0 + kLanes, _mm256_add_pd(_mm256_loadu_pd(a0 + kLanes),
                                                _mm256_mul_pd(e2, e2)));
  }
}

void mac_group_avx2(const MacKernelInput& in, const double* z, double* acc) {
  const std::size_t m = in.m, l = in.l, d = m + l;
  __m256d st[kMaxDim];
  for (std::size_t i = 0; i < d; ++i) {
    __m256d v = _mm256_setzero_pd();
    for (std::size_t j = 0; j < d; ++j) {
      const __m256d a = _mm256_set1_pd(in.mix[i * d + j]);
      v = _mm256_add_pd(v, _mm256_mul_pd(a, _mm256_loadu_pd(z + j * kLanes)));
    }
    st[i] = v;
  }
  __m256d xt = _mm256_setzero_pd();
  for (std::size_t k = 0; k < l; ++k) {
    const __m256d x = _mm256_mul_pd(_mm256_set1_pd(in.coeff[k]), st[m + k]);
    const __m256d p2 = _mm256_mul_pd(x, x);
    double* a0 = acc + (m + k) * 2 * kLanes;
    _mm256_storeu_pd(a0, _mm256_add_pd(_mm256_loadu_pd(a0), p2));
    _mm256_storeu_pd(a0 + kLanes, _mm256_add_pd(_mm256_loadu_pd(a0 + kLanes),
                                                _mm256_mul_pd(p2, p2)));
    xt = _mm256_add_pd(xt, _mm256_mul_pd(_mm256_set1_pd(in.delta[k]), x));
  }
  const __m256d y = _mm256_add_pd(
      xt, _mm256_mul_pd(_mm256_set1_pd(in.noise_sd), _mm256_loadu_pd(z + d * kLanes)));
  for (std::size_t i = 0; i < m; ++i) {
    const __m256d e =
        _mm256_sub_pd(st[i], _mm256_mul_pd(_mm256_set1_pd(in.gain[i]), y));
    const __m256d e2 = _mm256_mul_pd(e, e);
    double* a0 = acc + i * 2 * kLanes;
    _mm256_storeu_pd(a0, _mm256_add_pd(_mm256_loadu_pd(a0), e2));
    _mm256_storeu_pd(a0 + kLanes, _mm256_add_pd(_mm256_loadu_pd(a0 + kLanes),
                                                _mm256_mul_pd(e2, e2)));
  }
}

}  // namespace uncoded

#endif  // x86-64
