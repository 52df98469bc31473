#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uncoded/analysis.hpp"

using namespace uncoded;

namespace {

BcScheme scheme_for(const SourceSpec& src, double p) {
  return normalize_alpha(Vec(src.m, 1.0), src, p);
}

}  // namespace

TEST_CASE("closed-form eigenvalues at the reference point") {
  const auto e = three_component_eigs(0.5, 1.0 / 6.0);
  CHECK(e[0] == 1.0);
  CHECK(std::abs(e[1] - 0.2) <= 1e-12);
  CHECK(std::abs(e[2] - 0.5) <= 1e-12);
  CHECK_THROWS_AS(three_component_eigs(-0.6, -0.5), std::domain_error);
}

TEST_CASE("closed-form eigenvalues agree with the numeric solver") {
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  while (done < 1000) {
    const double r1 = u(rng);
    const double r2 = 2.0 * u(rng) - 1.0;
    if (!valid_rho_region(r1, r2)) continue;
    const SymMatrix cov = three_component_cov(r1, r2);
    SourceSpec src;
    src.m = 3;
    src.sigma_s = cov;
    if (!validate(src).ok()) continue;
    const BcScheme s = scheme_for(src, 3.0);
    const Corollary2Result c2 = corollary2_existence(s, src);
    const auto e = three_component_eigs(r1, r2);
    const double lam2 = std::max(e[1], e[2]);
    CHECK(std::abs(c2.lambda2 - lam2) <= 1e-10);
    ++done;
  }
}

TEST_CASE("region classification matches corollary 2 off the boundary") {
  const std::size_t n = 60;
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double r1 = -1.0 + 2.0 * (ix + 0.5) / n;
      const double r2 = -1.0 + 2.0 * (iy + 0.5) / n;
      const double band = 1e-6;
      const double dist =
          std::min({std::abs(r2 - 1.0), std::abs(r1), std::abs(1.0 - r1),
                    std::abs(r1 + 2.0 * r2) / std::sqrt(5.0),
                    std::abs(r2 - (2.0 * r1 * r1 - 1.0))});
      if (dist <= band) continue;
      SourceSpec src;
      src.m = 3;
      src.sigma_s = three_component_cov(r1, r2);
      if (!validate(src).ok()) {
        CHECK_FALSE(valid_rho_region(r1, r2));
        continue;
      }
      const BcScheme s = scheme_for(src, 3.0);
      CHECK(corollary2_existence(s, src).exists == valid_rho_region(r1, r2));
    }
}

TEST_CASE("fan sweep shape at the reference correlation") {
  SourceSpec src;
  src.m = 3;
  src.sigma_s = three_component_cov(0.5, 1.0 / 6.0);
  REQUIRE(validate(src).ok());
  const BcScheme s = scheme_for(src, 3.0);
  GridSpec grid;
  grid.nx = 24;
  grid.ny = 24;
  const SweepGrid g = sweep_fan(src, s, grid);

  // Upward closure in both transformed coordinates.
  for (std::size_t iy = 0; iy < grid.ny; ++iy)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      if (g.y_axis[iy] > g.x_axis[ix]) {
        CHECK_FALSE(g.matched(ix, iy));
        continue;
      }
      if (!g.matched(ix, iy)) continue;
      for (std::size_t jy = iy; jy < grid.ny; ++jy)
        for (std::size_t jx = ix; jx < grid.nx; ++jx)
          if (g.y_axis[jy] <= g.x_axis[jx]) CHECK(g.matched(jx, jy));
    }

  bool has_c2 = false, has_bound = false;
  for (const auto& o : g.overlays) {
    if (o.curve == "corollary2_point") {
      // Second largest eigenvalue at this correlation is 0.5, so the
      // equal-noise threshold sits at 0.5 P in transformed coordinates.
      has_c2 = true;
      CHECK(o.x == doctest::Approx(1.5).epsilon(1e-9));
      CHECK(o.y == doctest::Approx(1.5).epsilon(1e-9));
    }
    if (o.curve == "first_pivot_bound") has_bound = true;
  }
  CHECK(has_c2);
  CHECK(has_bound);
}

TEST_CASE("corollary 2 point sits on the fan boundary") {
  SourceSpec src;
  src.m = 3;
  src.sigma_s = three_component_cov(0.5, 1.0 / 6.0);
  const BcScheme s = scheme_for(src, 3.0);
  const double p = 3.0;
  const double c = p * corollary2_existence(s, src).lambda2;
  CHECK(c == doctest::Approx(1.5).epsilon(1e-9));
  auto inv = [p](double t) { return t * p / (p - t); };
  auto matched_at = [&](double t) {
    const double s2 = inv(t);
    return certify(s, BcChannel{{s2, s2, s2}}, src).matched;
  };
  CHECK(matched_at(c));
  CHECK_FALSE(matched_at(c * (1.0 - 1e-4)));
}

TEST_CASE("fan sweep rejects out-of-range grids") {
  SourceSpec src;
  src.m = 3;
  src.sigma_s = three_component_cov(0.5, 1.0 / 6.0);
  const BcScheme s = scheme_for(src, 3.0);
  GridSpec grid;
  grid.nx = 4;
  grid.ny = 4;
  grid.x_lo = 0.5;
  grid.x_hi = 3.5;  // beyond P
  grid.y_lo = 0.5;
  grid.y_hi = 1.0;
  CHECK_THROWS_AS(sweep_fan(src, s, grid), std::invalid_argument);
}

TEST_CASE("symmetric threshold curve") {
  CHECK(symmetric_curve(2, 0.5, 3.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::isinf(symmetric_curve(3, 0.0, 3.0)));
  CHECK(symmetric_curve(4, 0.999, 5.0) <= 0.01);
  CHECK_THROWS_AS(symmetric_curve(1, 0.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_curve(3, 1.0, 3.0), std::invalid_argument);
}

TEST_CASE("symmetric curve equals the bisected threshold") {
  for (std::size_t m = 2; m <= 4; ++m)
    for (double rho : {0.2, 0.5, 0.8}) {
      SymMatrix cov(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) cov.set(i, j, i == j ? 1.0 : rho);
      const SourceSpec src = make_source(cov);
      const BcScheme s = scheme_for(src, 2.0);
      const double expected = symmetric_curve(m, rho, 2.0);
      const double got = threshold_noise(s, src, {});
      CHECK(std::abs(got - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("sweep is deterministic") {
  SourceSpec src;
  src.m = 3;
  src.sigma_s = three_component_cov(0.5, 1.0 / 6.0);
  const BcScheme s = scheme_for(src, 3.0);
  GridSpec grid;
  grid.nx = 16;
  grid.ny = 16;
  const SweepGrid a = sweep_fan(src, s, grid);
  const SweepGrid b = sweep_fan(src, s, grid);
  CHECK(a.cells == b.cells);
  CHECK(a.x_axis == b.x_axis);
}
