#include "uncoded/model.hpp"

#include <cmath>
#include <sstream>

namespace uncoded {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// lambda_min and lambda_max of a symmetric matrix.
std::pair<double, double> eig_extremes(const SymMatrix& a) {
  if (a.dim() == 0) return {0.0, 0.0};
  const EigenReport e = eig_sym(a);
  return {e.eigenvalues.back(), e.eigenvalues.front()};
}

}  // namespace

SourceSpec make_source(const SymMatrix& sigma_s) {
  SourceSpec s{sigma_s.dim(), sigma_s};
  const ValidationReport rep = validate(s);
  if (!rep.ok()) throw std::invalid_argument("make_source: " + rep.violations.front());
  return s;
}

BcScheme normalize_alpha(const Vec& direction, const SourceSpec& src, double p_target) {
  if (direction.size() != src.m)
    throw std::invalid_argument("normalize_alpha: dimension mismatch");
  if (p_target <= 0.0) throw std::invalid_argument("normalize_alpha: p_target <= 0");
  for (double a : direction)
    if (a == 0.0) throw std::invalid_argument("normalize_alpha: zero entry in direction");

  const double q = quad_form(direction, src.sigma_s);
  if (q <= 0.0) throw std::invalid_argument("normalize_alpha: direction has zero power");
  const double c = std::sqrt(p_target / q);
  BcScheme s;
  s.alpha.resize(src.m);
  for (std::size_t i = 0; i < src.m; ++i) s.alpha[i] = c * direction[i];
  s.p = p_target;
  const Vec sa = src.sigma_s.mul(s.alpha);
  s.beta.resize(src.m);
  for (std::size_t i = 0; i < src.m; ++i) s.beta[i] = sa[i] / p_target;
  return s;
}

MacProblem ceo_to_mac(const CeoModel& c) {
  const std::size_t l = c.d.size();
  MacProblem p;
  p.m = 1;
  p.l = l;
  p.sigma_s = SymMatrix(1);
  p.sigma_s.set(0, 0, c.sigma2_s);
  p.sigma_t = SymMatrix(l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = c.d[i] * c.d[j] * c.sigma2_s;
      if (i == j) v += c.sigma2_obs;
      p.sigma_t.set(i, j, v);
    }
  p.cross.assign(1, Vec(l));
  for (std::size_t j = 0; j < l; ++j) p.cross[0][j] = c.d[j] * c.sigma2_s;
  p.delta = c.delta;
  p.powers = c.powers;
  p.noise = c.noise;
  return p;
}

ValidationReport validate(const SourceSpec& s) {
  ValidationReport rep;
  if (s.m == 0 || s.sigma_s.dim() != s.m) {
    rep.violations.push_back("sigma_s dimension does not match m");
    return rep;
  }
  const auto [lmin, lmax] = eig_extremes(s.sigma_s);
  if (lmin < -kRankTol * std::max(1.0, lmax))
    rep.violations.push_back("sigma_s not PSD (lambda_min = " + num(lmin) + ")");
  else if (lmin <= kRankTol * lmax)
    rep.violations.push_back("sigma_s rank deficient (lambda_min = " + num(lmin) + ")");
  return rep;
}

ValidationReport validate(const BcChannel& c) {
  ValidationReport rep;
  if (c.noise_powers.empty()) rep.violations.push_back("noise_powers empty");
  for (std::size_t i = 0; i < c.noise_powers.size(); ++i) {
    if (!(c.noise_powers[i] > 0.0))
      rep.violations.push_back("noise power " + std::to_string(i + 1) +
                               " not positive: " + num(c.noise_powers[i]));
    if (i + 1 < c.noise_powers.size() && c.noise_powers[i] < c.noise_powers[i + 1])
      rep.violations.push_back(
          "noise_powers not non-increasing at index " + std::to_string(i + 1) + " (" +
          num(c.noise_powers[i]) + " < " + num(c.noise_powers[i + 1]) + ")");
  }
  return rep;
}

ValidationReport validate(const BcScheme& s, const SourceSpec& src) {
  ValidationReport rep;
  if (s.alpha.size() != src.m || s.beta.size() != src.m) {
    rep.violations.push_back("scheme dimension does not match source");
    return rep;
  }
  for (std::size_t i = 0; i < s.alpha.size(); ++i)
    if (s.alpha[i] == 0.0)
      rep.violations.push_back("alpha_" + std::to_string(i + 1) + " is zero");
  if (!(s.p > 0.0)) rep.violations.push_back("transmit power not positive");
  const double ab = dot(s.alpha, s.beta);
  if (std::abs(ab - 1.0) > 1e-12)
    rep.violations.push_back("sum alpha_m beta_m != 1 (off by " + num(ab - 1.0) + ")");
  return rep;
}

ValidationReport validate(const MacProblem& p) {
  ValidationReport rep;
  if (p.m == 0 || p.l < p.m) rep.violations.push_back("need 1 <= M <= L");
  if (p.sigma_s.dim() != p.m || p.sigma_t.dim() != p.l ||
      p.cross.size() != p.m || (p.m > 0 && p.cross[0].size() != p.l) ||
      p.delta.size() != p.l || p.powers.size() != p.l) {
    rep.violations.push_back("inconsistent dimensions");
    return rep;
  }
  for (std::size_t i = 0; i < p.l; ++i) {
    if (!(p.delta[i] > 0.0))
      rep.violations.push_back("delta_" + std::to_string(i + 1) + " not positive");
    if (!(p.powers[i] > 0.0))
      rep.violations.push_back("P_" + std::to_string(i + 1) + " not positive");
  }
  if (!(p.noise > 0.0)) rep.violations.push_back("channel noise not positive");

  const auto [smin, smax] = eig_extremes(p.sigma_s);
  if (smin <= kRankTol * std::max(1.0, smax))
    rep.violations.push_back("sigma_s not full-rank PSD (lambda_min = " + num(smin) + ")");
  const auto [tmin, tmax] = eig_extremes(p.sigma_t);
  if (tmin <= kRankTol * std::max(1.0, tmax))
    rep.violations.push_back("sigma_t not full-rank PSD (lambda_min = " + num(tmin) + ")");

  // Joint covariance [[sigma_s, cross], [cross^t, sigma_t]] must be PSD.
  const std::size_t n = p.m + p.l;
  SymMatrix joint(n);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j <= i; ++j) joint.set(i, j, p.sigma_s(i, j));
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.l; ++j) joint.set(i, p.m + j, p.cross[i][j]);
  for (std::size_t i = 0; i < p.l; ++i)
    for (std::size_t j = 0; j <= i; ++j) joint.set(p.m + i, p.m + j, p.sigma_t(i, j));
  if (!ldl_psd_test(joint).psd())
    rep.violations.push_back("joint (source, observation) covariance not PSD");

  if (tmin > kRankTol * std::max(1.0, tmax)) {
    // cross must have full row rank, and so must sigma_stilde.
    SymMatrix gram(p.m);
    for (std::size_t i = 0; i < p.m; ++i)
      for (std::size_t j = 0; j <= i; ++j) gram.set(i, j, dot(p.cross[i], p.cross[j]));
    const auto [gmin, gmax] = eig_extremes(gram);
    if (gmin <= kRankTol * std::max(1.0, gmax))
      rep.violations.push_back("cross covariance not full row rank");
    else {
      SymMatrix stilde(p.m);
      for (std::size_t i = 0; i < p.m; ++i) {
        const Vec gi = solve(p.sigma_t, p.cross[i]);
        for (std::size_t j = 0; j <= i; ++j) stilde.set(i, j, dot(gi, p.cross[j]));
      }
      const auto [emin, emax] = eig_extremes(stilde);
      if (emin <= kRankTol * std::max(1.0, emax))
        rep.violations.push_back("sigma_stilde not full rank");
    }
  }
  return rep;
}

ValidationReport validate(const CeoModel& c) {
  ValidationReport rep;
  if (!(c.sigma2_s > 0.0)) rep.violations.push_back("sigma2_s not positive");
  if (!(c.sigma2_obs > 0.0)) rep.violations.push_back("sigma2_obs not positive");
  if (c.d.empty()) rep.violations.push_back("no sensors");
  bool any = false;
  for (std::size_t i = 0; i < c.d.size(); ++i) {
    if (c.d[i] < 0.0)
      rep.violations.push_back("d_" + std::to_string(i + 1) + " negative");
    if (c.d[i] > 0.0) any = true;
  }
  if (!any) rep.violations.push_back("all observation gains zero");
  if (c.delta.size() != c.d.size() || c.powers.size() != c.d.size())
    rep.violations.push_back("delta/powers length does not match sensor count");
  for (std::size_t i = 0; i < c.delta.size(); ++i)
    if (!(c.delta[i] > 0.0))
      rep.violations.push_back("delta_" + std::to_string(i + 1) + " not positive");
  for (std::size_t i = 0; i < c.powers.size(); ++i)
    if (!(c.powers[i] > 0.0))
      rep.violations.push_back("P_" + std::to_string(i + 1) + " not positive");
  if (!(c.noise > 0.0)) rep.violations.push_back("channel noise not positive");
  return rep;
}

}  // namespace uncoded
