#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "uncoded/mcsim.hpp"

using namespace uncoded;

namespace {

SourceSpec two_user() {
  return make_source(SymMatrix::from_rows({{1.0, 0.5}, {0.5, 1.0}}));
}

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

bool same_report(const SimReport& a, const SimReport& b) {
  return a.empirical_d == b.empirical_d && a.stderr_d == b.stderr_d &&
         a.empirical_power == b.empirical_power && a.stderr_power == b.stderr_power &&
         a.n_used == b.n_used;
}

}  // namespace

TEST_CASE("broadcast simulation matches the closed form") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const BcChannel ch{{2.0, 2.0}};
  const SimReport r = simulate_bc(s, ch, src, SimConfig{300000, 2024, false});
  CHECK(r.closed_d[0] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(r.closed_d[1] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(r.closed_power[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.n_used >= 300000);
  for (double se : r.stderr_d) CHECK(se > 0.0);
  for (double se : r.stderr_power) CHECK(se > 0.0);
  CHECK(r.max_z() < 4.0);
}

TEST_CASE("vanishing power leaves the prior variance") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 1e-9);
  const BcChannel ch{{2.0, 2.0}};
  const SimReport r = simulate_bc(s, ch, src, SimConfig{50000, 5, false});
  CHECK(r.closed_d[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.max_z() < 4.0);
}

TEST_CASE("repeated seeds are bit-identical") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const BcChannel ch{{2.0, 2.0}};
  const SimConfig cfg{40000, 99, false};
  CHECK(same_report(simulate_bc(s, ch, src, cfg), simulate_bc(s, ch, src, cfg)));
  const SimConfig anti{40000, 99, true};
  CHECK(same_report(simulate_bc(s, ch, src, anti), simulate_bc(s, ch, src, anti)));
}

TEST_CASE("thread count does not change the report") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const BcChannel ch{{2.0, 2.0}};
  const SimConfig cfg{150000, 7, false};
  setenv("UNCODED_MATCH_THREADS", "1", 1);
  const SimReport one = simulate_bc(s, ch, src, cfg);
  setenv("UNCODED_MATCH_THREADS", "3", 1);
  const SimReport three = simulate_bc(s, ch, src, cfg);
  unsetenv("UNCODED_MATCH_THREADS");
  CHECK(same_report(one, three));
}

TEST_CASE("ceo simulation matches the closed form and the power budget") {
  const MacProblem p = ceo_to_mac(unit_ceo());
  const MacScheme s{{1, 1}};
  const SimReport r = simulate_mac(p, s, SimConfig{300000, 31, false});
  CHECK(r.closed_d[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.closed_power[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.closed_power[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max_z() < 4.0);
}

TEST_CASE("huge channel noise drives distortion to the prior") {
  MacProblem p = ceo_to_mac(unit_ceo());
  p.noise = 1e9;
  const SimReport r = simulate_mac(p, MacScheme{{1, 1}}, SimConfig{50000, 3, false});
  CHECK(r.closed_d[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.max_z() < 4.0);
}

TEST_CASE("global sign flip leaves the distortion statistics") {
  const MacProblem p = ceo_to_mac(unit_ceo());
  const SimReport pos = simulate_mac(p, MacScheme{{1, 1}}, SimConfig{200000, 17, false});
  const SimReport neg = simulate_mac(p, MacScheme{{-1, -1}}, SimConfig{200000, 17, false});
  CHECK(pos.closed_d[0] == neg.closed_d[0]);
  const double se = std::hypot(pos.stderr_d[0], neg.stderr_d[0]);
  CHECK(std::abs(pos.empirical_d[0] - neg.empirical_d[0]) <= 4.0 * se);
}

TEST_CASE("variance reduction beats plain sampling on the worked case") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const BcChannel ch{{2.0, 2.0}};
  const std::uint64_t n = 200000;
  double worst = 0.0;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const SimReport plain = simulate_bc(s, ch, src, SimConfig{n, seed, false});
    const SimReport anti = simulate_bc(s, ch, src, SimConfig{n, seed, true});
    CHECK(anti.max_z() < 4.0);
    for (std::size_t i = 0; i < plain.stderr_d.size(); ++i)
      worst = std::max(worst, anti.stderr_d[i] / plain.stderr_d[i]);
  }
  CHECK(worst <= 0.8);
}

TEST_CASE("config validation") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const BcChannel ch{{2.0, 2.0}};
  CHECK_THROWS_AS(simulate_bc(s, ch, src, SimConfig{0, 1, false}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_bc(s, ch, src, SimConfig{32, 1, true}), std::invalid_argument);
  // 32 samples round up to one block; plain mode accepts it.
  const SimReport r = simulate_bc(s, ch, src, SimConfig{5, 1, false});
  CHECK(r.n_used == 32);
}

TEST_CASE("report names the active backend") {
  const SourceSpec src = two_user();
  const BcScheme s = normalize_alpha({1.0, 1.0}, src, 3.0);
  const SimReport r = simulate_bc(s, BcChannel{{2.0, 2.0}}, src, SimConfig{64, 1, false});
  CHECK((r.backend == "avx2" || r.backend == "scalar"));
}
