#include "uncoded/kernels.hpp"

// Reference kernels. Per-lane arithmetic must stay a plain mul/add sequence;
// the AVX2 variants replay the identical operation order across all lanes.

namespace uncoded {

void bc_group_scalar(const BcKernelInput& in, const double* zsrc,
                     const double* znoise, double* acc) {
  const std::size_t m = in.m;
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    double s[kMaxDim];
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < m; ++j) v += in.mix[i * m + j] * zsrc[j * kLanes + lane];
      s[i] = v;
    }
    double x = 0.0;
    for (std::size_t i = 0; i < m; ++i) x += in.alpha[i] * s[i];
    const double x2 = x * x;
    acc[m * 2 * kLanes + lane] += x2;
    acc[m * 2 * kLanes + kLanes + lane] += x2 * x2;
    for (std::size_t i = 0; i < m; ++i) {
      const double y = x + in.noise_sd[i] * znoise[i * kLanes + lane];
      const double e = s[i] - in.gain[i] * y;
      const double e2 = e * e;
      acc[i * 2 * kLanes + lane] += e2;
      acc[i * 2 * kLanes + kLanes + lane] += e2 * e2;
    }
  }
}

void mac_group_scalar(const MacKernelInput& in, const double* z, double* acc) {
  const std::size_t m = in.m, l = in.l, d = m + l;
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    double st[kMaxDim];
    for (std::size_t i = 0; i < d; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < d; ++j) v += in.mix[i * d + j] * z[j * kLanes + lane];
      st[i] = v;
    }
    double xt = 0.0;
    for (std::size_t k = 0; k < l; ++k) {
      const double x = in.coeff[k] * st[m + k];
      const double p2 = x * x;
      acc[(m + k) * 2 * kLanes + lane] += p2;
      acc[(m + k) * 2 * kLanes + kLanes + lane] += p2 * p2;
      xt += in.delta[k] * x;
    }
    const double y = xt + in.noise_sd * z[d * kLanes + lane];
    for (std::size_t i = 0; i < m; ++i) {
      const double e = st[i] - in.gain[i] * y;
      const double e2 = e * e;
      acc[i * 2 * kLanes + lane] += e2;
      acc[i * 2 * kLanes + kLanes + lane] += e2 * e2;
    }
  }
}

}  // namespace uncoded
