#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "uncoded/kernels.hpp"
#include "uncoded/rng.hpp"
#include "uncoded/symmat.hpp"

using namespace uncoded;

#if defined(__x86_64__) || defined(_M_X64)

namespace {

bool avx2_here() { return __builtin_cpu_supports("avx2"); }

Vec randv(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (double& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("broadcast kernels are bit-identical across backends") {
  if (!avx2_here()) return;
  std::mt19937_64 rng(1);
  for (int it = 0; it < 200; ++it) {
    const std::size_t m = 1 + it % 6;
    const Vec mix = randv(rng, m * m);
    const Vec alpha = randv(rng, m);
    const Vec gain = randv(rng, m);
    Vec noise_sd = randv(rng, m);
    for (double& v : noise_sd) v = std::abs(v) + 0.1;
    const Vec zsrc = randv(rng, m * kLanes);
    const Vec znoise = randv(rng, m * kLanes);

    BcKernelInput in;
    in.m = m;
    in.mix = mix.data();
    in.alpha = alpha.data();
    in.gain = gain.data();
    in.noise_sd = noise_sd.data();

    Vec acc_s((m + 1) * 2 * kLanes), acc_v = acc_s;
    // Nonzero starting accumulators exercise the read-modify-write path.
    for (std::size_t i = 0; i < acc_s.size(); ++i) acc_s[i] = acc_v[i] = 0.25 * i;
    for (int rep = 0; rep < 3; ++rep) {
      bc_group_scalar(in, zsrc.data(), znoise.data(), acc_s.data());
      bc_group_avx2(in, zsrc.data(), znoise.data(), acc_v.data());
    }
    CHECK(std::memcmp(acc_s.data(), acc_v.data(), acc_s.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("mac kernels are bit-identical across backends") {
  if (!avx2_here()) return;
  std::mt19937_64 rng(2);
  for (int it = 0; it < 200; ++it) {
    const std::size_t m = 1 + it % 3, l = m + it % 4;
    const std::size_t d = m + l;
    const Vec mix = randv(rng, d * d);
    const Vec coeff = randv(rng, l);
    const Vec delta = randv(rng, l);
    const Vec gain = randv(rng, m);
    const Vec z = randv(rng, (d + 1) * kLanes);

    MacKernelInput in;
    in.m = m;
    in.l = l;
    in.mix = mix.data();
    in.coeff = coeff.data();
    in.delta = delta.data();
    in.gain = gain.data();
    in.noise_sd = 0.7;

    Vec acc_s((m + l) * 2 * kLanes, 0.0), acc_v = acc_s;
    for (int rep = 0; rep < 3; ++rep) {
      mac_group_scalar(in, z.data(), acc_s.data());
      mac_group_avx2(in, z.data(), acc_v.data());
    }
    CHECK(std::memcmp(acc_s.data(), acc_v.data(), acc_s.size() * sizeof(double)) == 0);
  }
}

#endif

TEST_CASE("dispatch reports a backend and returns callable kernels") {
  CHECK(bc_group_fn() != nullptr);
  CHECK(mac_group_fn() != nullptr);
  const std::string b = kernel_backend();
  CHECK((b == "avx2" || b == "scalar"));
}

TEST_CASE("counter rng is a pure function of (seed, counter)") {
  CHECK(rng_word(1, 0) == rng_word(1, 0));
  CHECK(rng_word(1, 0) != rng_word(2, 0));
  CHECK(rng_word(1, 0) != rng_word(1, 1));
  const double u = rng_unit(9, 42);
  CHECK(u > 0.0);
  CHECK(u < 1.0);
}

TEST_CASE("inverse normal cdf hits known quantiles") {
  CHECK(std::abs(inv_normal_cdf(0.5)) <= 1e-15);
  CHECK(inv_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(inv_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(inv_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-9));
  // Round trip against erfc. Deep in the upper tail p saturates toward 1
  // and loses absolute resolution, so only the lower and central range can
  // hold a tight relative bound.
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double p = 0.5 * std::erfc(-x / 1.4142135623730951);
    const double tol = x <= 4.5 ? 1e-11 : 1e-7;
    CHECK(inv_normal_cdf(p) == doctest::Approx(x).epsilon(tol));
  }
}

TEST_CASE("normal draws have sane moments") {
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng_normal(7, i);
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) <= 0.01);
  CHECK(std::abs(s2 / n - 1.0) <= 0.02);
}
