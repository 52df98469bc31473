#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uncoded/mac_match.hpp"

using namespace uncoded;

namespace {

CeoModel unit_ceo() {
  CeoModel c;
  c.sigma2_s = 1.0;
  c.d = {1.0, 1.0};
  c.sigma2_obs = 1.0;
  c.delta = {1.0, 1.0};
  c.powers = {1.0, 1.0};
  c.noise = 1.0;
  return c;
}

bool cond1_holds(const SymMatrix& t, const std::vector<int>& eta) {
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = i + 1; j < t.dim(); ++j)
      if (eta[i] * eta[j] * t(i, j) < -1e-12) return false;
  return true;
}

// Brute force over all 2^L sign vectors.
bool exhaustive_feasible(const SymMatrix& t) {
  const std::size_t l = t.dim();
  for (std::uint64_t mask = 0; mask < (1ULL << l); ++mask) {
    std::vector<int> eta(l);
    for (std::size_t i = 0; i < l; ++i) eta[i] = (mask >> i) & 1 ? -1 : 1;
    if (cond1_holds(t, eta)) return true;
  }
  return false;
}

SymMatrix random_sign_pattern(std::mt19937_64& rng, std::size_t l, double edge_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SymMatrix t(l);
  for (std::size_t i = 0; i < l; ++i) t.set(i, i, 1.0);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j)
      if (u(rng) < edge_prob) t.set(i, j, (u(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 0.4 * u(rng)));
  return t;
}

// M = L problem where the sensors observe the sources directly.
MacProblem direct_observation(const SymMatrix& sigma_s, double noise) {
  MacProblem p;
  p.m = p.l = sigma_s.dim();
  p.sigma_s = sigma_s;
  p.sigma_t = sigma_s;
  p.cross.assign(p.m, Vec(p.l));
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.l; ++j) p.cross[i][j] = sigma_s(i, j);
  p.delta.assign(p.l, 1.0);
  p.powers.assign(p.l, 1.0);
  p.noise = noise;
  return p;
}

}  // namespace

TEST_CASE("sign assignment on simple patterns") {
  // Positively correlated pair: all +1.
  SymMatrix t = SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
  const SignAssignment a = sign_assignment(t);
  REQUIRE(a.feasible);
  CHECK(a.scheme.eta == std::vector<int>{1, 1});

  // Negative edge flips the second sensor.
  t = SymMatrix::from_rows({{1.0, -0.5}, {-0.5, 1.0}});
  const SignAssignment b = sign_assignment(t);
  REQUIRE(b.feasible);
  CHECK(b.scheme.eta == std::vector<int>{1, -1});

  // All-negative triangle is an odd cycle.
  t = SymMatrix::from_rows({{1.0, -0.4, -0.4}, {-0.4, 1.0, -0.4}, {-0.4, -0.4, 1.0}});
  const SignAssignment c = sign_assignment(t);
  CHECK_FALSE(c.feasible);
  CHECK(c.violating_cycle.size() >= 3);
  CHECK(c.violating_cycle.size() % 2 == 1);
}

TEST_CASE("sign assignment agrees with exhaustive search") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 600; ++it) {
    const std::size_t l = 2 + it % 7;
    const SymMatrix t = random_sign_pattern(rng, l, 0.3 + 0.5 * u(rng));
    const SignAssignment a = sign_assignment(t);
    CHECK(a.feasible == exhaustive_feasible(t));
    if (a.feasible) {
      CHECK(cond1_holds(t, a.scheme.eta));
    } else {
      // The reported cycle must have an odd number of negative edges.
      int negs = 0;
      const auto& cyc = a.violating_cycle;
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        const double psi = t(cyc[i], cyc[(i + 1) % cyc.size()]);
        CHECK(psi != 0.0);
        if (psi < 0.0) ++negs;
      }
      CHECK(negs % 2 == 1);
    }
  }
}

TEST_CASE("coherent power equals the direct variance under condition 1") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  int done = 0;
  while (done < 100) {
    const std::size_t l = 2 + static_cast<std::size_t>(u(rng) * 5.0);
    // Build a feasible observation covariance from a Gram matrix with signs.
    Mat b(l, Vec(l));
    for (auto& row : b)
      for (double& v : row) v = u(rng);
    std::vector<int> flips(l);
    for (auto& f : flips) f = u(rng) < 0.5 ? -1 : 1;
    MacProblem p;
    p.m = 1;
    p.l = l;
    p.sigma_t = SymMatrix(l);
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        p.sigma_t.set(i, j, flips[i] * flips[j] * (dot(b[i], b[j]) + (i == j ? 0.2 : 0.0)));
    p.delta.assign(l, 0.0);
    p.powers.assign(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
      p.delta[i] = u(rng);
      p.powers[i] = u(rng);
    }
    const SignAssignment sa = sign_assignment(p.sigma_t);
    REQUIRE(sa.feasible);

    Vec v(l);
    for (std::size_t i = 0; i < l; ++i)
      v[i] = p.delta[i] * sa.scheme.eta[i] * std::sqrt(p.powers[i] / p.sigma_t(i, i));
    const double direct = quad_form(v, p.sigma_t);
    const double closed = coherent_power(p, sa.scheme);
    CHECK(std::abs(direct - closed) <= 1e-12 * std::max(1.0, std::abs(direct)));
    ++done;
  }
}

TEST_CASE("unit CEO worked case") {
  const CeoModel c = unit_ceo();
  const MacProblem p = ceo_to_mac(c);
  const SignAssignment sa = sign_assignment(p.sigma_t);
  REQUIRE(sa.feasible);
  const MacCertificate cert = certify_mac(p, sa.scheme);
  CHECK(cert.cond1);
  CHECK(cert.cond2);
  CHECK(cert.cond3);
  CHECK(cert.matched);
  CHECK(cert.coherent_p == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(cert.sigma_stilde(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const MacDistortion d = mac_distortions(p, sa.scheme);
  CHECK(d.delta_floor[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.d[0] == doctest::Approx(0.5).epsilon(1e-12));

  const ProportionalityResult pr = ceo_proportional_check(c);
  CHECK(pr.applicable);
  CHECK(pr.proportional);
}

TEST_CASE("unequal observation gains break condition 2") {
  CeoModel c = unit_ceo();
  c.d = {1.0, 2.0};
  const MacProblem p = ceo_to_mac(c);
  const SignAssignment sa = sign_assignment(p.sigma_t);
  REQUIRE(sa.feasible);
  const MacCertificate cert = certify_mac(p, sa.scheme);
  CHECK_FALSE(cert.cond2);
  CHECK_FALSE(cert.matched);
  CHECK_FALSE(ceo_proportional_check(c).proportional);
}

TEST_CASE("proportionality is equivalent to condition 2 on random CEO models") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int it = 0; it < 300; ++it) {
    const std::size_t l = 2 + it % 4;
    CeoModel c;
    c.sigma2_s = u(rng);
    c.sigma2_obs = u(rng);
    c.noise = u(rng);
    c.d.assign(l, 0.0);
    c.delta.assign(l, 0.0);
    c.powers.assign(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
      c.d[i] = u(rng);
      c.delta[i] = u(rng);
      c.powers[i] = u(rng);
    }
    if (pick(rng) < 0.5) {
      // Force the proportional configuration, then check cond2 turns on.
      const double k = u(rng);
      for (std::size_t i = 0; i < l; ++i) {
        const double d2 = c.d[i] * c.d[i];
        c.powers[i] = k * (d2 * c.sigma2_s + c.sigma2_obs) * d2 / (c.delta[i] * c.delta[i]);
      }
    }
    const MacProblem p = ceo_to_mac(c);
    const MacScheme s{std::vector<int>(l, 1)};
    const MacCertificate cert = certify_mac(p, s);
    const ProportionalityResult pr = ceo_proportional_check(c);
    REQUIRE(pr.applicable);
    CHECK(cert.cond2 == pr.proportional);
  }
}

TEST_CASE("condition 3 flips at the eigenvalue floor") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  int done = 0;
  while (done < 60) {
    const std::size_t m = 2 + static_cast<std::size_t>(u(rng) * 4.0);
    Mat b(m, Vec(m));
    for (auto& row : b)
      for (double& v : row) v = u(rng);
    SymMatrix cov(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        cov.set(i, j, dot(b[i], b[j]) + (i == j ? 0.4 : 0.0));
    MacProblem p = direct_observation(cov, 1.0);
    const MacScheme s{std::vector<int>(m, 1)};
    MacCertificate probe = certify_mac(p, s);
    if (!probe.cond1 || !probe.cond2) continue;
    if (!(probe.noise_floor > 1e-6) || std::isinf(probe.noise_floor)) continue;
    p.noise = probe.noise_floor * (1.0 + 1e-6);
    CHECK(certify_mac(p, s).cond3);
    p.noise = probe.noise_floor * (1.0 - 1e-6);
    CHECK_FALSE(certify_mac(p, s).cond3);
    ++done;
  }
}

TEST_CASE("remote floor never exceeds the total distortion") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.1, 1.5);
  for (int it = 0; it < 200; ++it) {
    const std::size_t m = 1 + it % 3;
    Mat b(m, Vec(m));
    for (auto& row : b)
      for (double& v : row) v = u(rng);
    SymMatrix cov(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        cov.set(i, j, dot(b[i], b[j]) + (i == j ? 0.3 : 0.0));
    MacProblem p = direct_observation(cov, u(rng));
    const MacDistortion d = mac_distortions(p, MacScheme{std::vector<int>(m, 1)});
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(d.delta_floor[i] <= d.d[i] + 1e-12);
      CHECK(d.d[i] <= p.sigma_s(i, i) + 1e-12);
    }
  }
}

TEST_CASE("single-source problems have a vacuous condition 3") {
  const MacProblem p = ceo_to_mac(unit_ceo());
  const MacCertificate cert = certify_mac(p, MacScheme{{1, 1}});
  CHECK(cert.lambda2 == 0.0);
  CHECK(cert.noise_floor == 0.0);
  CHECK(cert.cond3);
}

TEST_CASE("eta length mismatch throws") {
  const MacProblem p = ceo_to_mac(unit_ceo());
  CHECK_THROWS_AS(certify_mac(p, MacScheme{{1}}), std::invalid_argument);
}
