#include "uncoded/bc_match.hpp"

#include <cmath>
#include <stdexcept>

namespace uncoded {

double noise_transform(double p, double sigma2) { return p * sigma2 / (p + sigma2); }

SymMatrix build_sigma_v(const BcScheme& scheme, const BcChannel& ch) {
  const std::size_t m = scheme.alpha.size();
  if (ch.noise_powers.size() != m)
    throw std::invalid_argument("build_sigma_v: dimension mismatch");
  const Vec& a = scheme.alpha;
  const Vec& b = scheme.beta;
  Vec cv(m);  // sigma2_{X|Y_m}
  for (std::size_t i = 0; i < m; ++i) cv[i] = noise_transform(scheme.p, ch.noise_powers[i]);

  SymMatrix v(m);
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) v.set(i, j, -b[i] * b[j] * cv[i]);
  for (std::size_t i = 0; i < m; ++i) {
    double head = 0.0;  // sum_{j<i} alpha_j beta_j
    for (std::size_t j = 0; j < i; ++j) head += a[j] * b[j];
    double tail = 0.0;  // sum_{j>i} alpha_j beta_j sigma2_{X|Y_j}
    for (std::size_t j = i + 1; j < m; ++j) tail += a[j] * b[j] * cv[j];
    v.set(i, i, (b[i] / a[i]) * (cv[i] * head + tail));
  }
  return v;
}

MatchCertificate certify(const BcScheme& scheme, const BcChannel& ch,
                         const SourceSpec& src, double tol) {
  const std::size_t m = src.m;
  const SymMatrix v = build_sigma_v(scheme, ch);
  SymMatrix s0(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      s0.set(i, j, v(i, j) - src.sigma_s(i, j) + scheme.p * scheme.beta[i] * scheme.beta[j]);

  MatchCertificate cert;
  cert.sigma0 = s0;
  cert.ldl = tol < 0.0 ? ldl_psd_test(s0) : ldl_psd_test(s0, tol);
  cert.matched = cert.ldl.psd();
  cert.lambda_min = eig_sym(s0).eigenvalues.back();
  return cert;
}

DistortionVector bc_distortions(const BcScheme& scheme, const BcChannel& ch,
                                const SourceSpec& src) {
  const std::size_t m = src.m;
  DistortionVector dv;
  dv.d.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double cov = scheme.p * scheme.beta[i];  // Cov(S_m, X)
    dv.d[i] = src.sigma_s(i, i) - cov * cov / (scheme.p + ch.noise_powers[i]);
  }
  return dv;
}

EqualityReport verify_outer_bound_equality(const MatchCertificate& cert,
                                           const DistortionVector& dist,
                                           const BcChannel& ch, const SourceSpec& src,
                                           const BcScheme& scheme) {
  const std::size_t m = src.m;
  const SymMatrix& w = cert.sigma_w();
  double lhs = 0.0;
  double denom = 1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double dj = dist.d[k - 1] + w(k - 1, k - 1);
    if (dj <= 0.0)
      throw std::invalid_argument("verify_outer_bound_equality: D_j + w_j <= 0");
    denom *= dj;
    const double next = (k == m) ? 0.0 : ch.noise_powers[k];
    const double weight = ch.noise_powers[k - 1] - next;
    if (weight == 0.0) continue;
    SymMatrix sw(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j <= i; ++j) sw.set(i, j, src.sigma_s(i, j) + w(i, j));
    lhs += weight * det(sw) / denom;
  }
  EqualityReport rep;
  rep.lhs = lhs;
  rep.rhs = scheme.p + ch.noise_powers[0];
  rep.gap = std::abs(rep.lhs - rep.rhs) / rep.rhs;
  return rep;
}

Lemma1Result lemma1_check(const BcScheme& scheme) {
  Lemma1Result r;
  for (std::size_t i = 0; i < scheme.alpha.size(); ++i)
    if (scheme.alpha[i] * scheme.beta[i] < -1e-12) {
      r.ok = false;
      r.violating.push_back(i);
    }
  return r;
}

namespace {

// Pi Sigma Pi with Pi_ii = sqrt(alpha_i / (P beta_i)); caller guarantees
// alpha_i beta_i > 0.
SymMatrix scaled_source(const BcScheme& scheme, const SymMatrix& sigma) {
  const std::size_t m = sigma.dim();
  Vec pi(m);
  for (std::size_t i = 0; i < m; ++i)
    pi[i] = std::sqrt(scheme.alpha[i] / (scheme.p * scheme.beta[i]));
  SymMatrix out(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, pi[i] * sigma(i, j) * pi[j]);
  return out;
}

}  // namespace

Corollary2Result corollary2_existence(const BcScheme& scheme, const SourceSpec& src) {
  Corollary2Result r;
  for (std::size_t i = 0; i < src.m; ++i)
    if (scheme.alpha[i] * scheme.beta[i] <= 0.0) return r;  // exists = false

  const EigenReport e = eig_sym(scaled_source(scheme, src.sigma_s));
  // The scaled source always has 1 in its spectrum (but not necessarily on
  // top): a deviation means alpha and beta are inconsistent.
  double near1 = std::numeric_limits<double>::infinity();
  for (double lam : e.eigenvalues) near1 = std::min(near1, std::abs(lam - 1.0));
  if (near1 > 1e-6)
    throw std::runtime_error(
        "corollary2_existence: scaled source has no unit eigenvalue; "
        "inconsistent scheme");
  r.lambda2 = src.m >= 2 ? e.eigenvalues[1] : 0.0;
  r.exists = e.eigenvalues.front() <= 1.0 + 1e-9 && r.lambda2 < 1.0 - 1e-9;
  if (r.exists && r.lambda2 < 1.0)
    r.noise_floor = r.lambda2 <= 0.0 ? 0.0 : r.lambda2 * scheme.p / (1.0 - r.lambda2);
  return r;
}

Corollary3Result corollary3_thresholds(const BcScheme& scheme, const SourceSpec& src) {
  Corollary3Result r;
  const std::size_t m = src.m;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (scheme.alpha[i] * scheme.alpha[j] * src.sigma_s(i, j) <= 0.0) return r;
  r.applicable = true;
  r.thresholds.assign(m, 0.0);
  const double p = scheme.p;
  for (std::size_t k = 1; k < m; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j)
      best = std::max(best,
                      scheme.beta[j] * scheme.beta[k] / src.sigma_s(j, k) * p * p - p);
    r.thresholds[k] = best;
  }
  return r;
}

double threshold_noise(const BcScheme& scheme, const SourceSpec& src,
                       const Vec& downstream) {
  const std::size_t m = src.m;
  if (downstream.size() >= m)
    throw std::invalid_argument("threshold_noise: downstream too long");
  const std::size_t idx = m - downstream.size();  // 1-based receiver index to solve for

  const double lo_floor = downstream.empty() ? 0.0 : downstream.front();
  const double big = 1e12 * std::max(1.0, scheme.p);

  // The default certification tolerance would shift the verdict flip point
  // by more than the bisection resolves, so bisect with a tighter one.
  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, src.sigma_s(i, i));
  const double tight_tol = 1e-13 * scale;

  auto matched_at = [&](double s2) {
    BcChannel ch;
    ch.noise_powers.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < idx; ++i) ch.noise_powers[i] = std::max(big, s2);
    ch.noise_powers[idx - 1] = s2;
    for (std::size_t i = 0; i < downstream.size(); ++i)
      ch.noise_powers[idx + i] = downstream[i];
    return certify(scheme, ch, src, tight_tol).matched;
  };

  // Find a passing upper endpoint.
  double hi = std::max(1.0, 4.0 * std::max(lo_floor, scheme.p));
  bool hi_ok = false;
  for (int it = 0; it < 60 && hi <= big; ++it) {
    if (matched_at(hi)) {
      hi_ok = true;
      break;
    }
    hi *= 4.0;
  }
  if (!hi_ok) {
    if (!corollary2_existence(scheme, src).exists)
      return std::numeric_limits<double>::infinity();
    throw std::runtime_error("threshold_noise: downstream noise powers infeasible");
  }
  if (lo_floor > 0.0 && matched_at(lo_floor)) return lo_floor;

  double lo = lo_floor;
  // Monotone bisection on the certify verdict (Corollary 1 direction).
  while (hi - lo > 1e-12 * hi) {
    const double mid = lo > 0.0 ? 0.5 * (lo + hi) : hi / 2.0;
    if (matched_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool corollary1_monotone_check(const BcScheme& scheme, const SourceSpec& src,
                               const BcChannel& ch, const BcChannel& ch_plus) {
  if (!certify(scheme, ch, src).matched)
    throw std::invalid_argument("corollary1_monotone_check: base channel not matched");
  for (std::size_t i = 0; i < ch.noise_powers.size(); ++i)
    if (ch_plus.noise_powers[i] < ch.noise_powers[i])
      throw std::invalid_argument("corollary1_monotone_check: ch_plus not >= ch");
  return certify(scheme, ch_plus, src).matched;
}

}  // namespace uncoded
