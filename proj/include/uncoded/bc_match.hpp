#pragma once

// Broadcast-channel matching: the auxiliary covariance construction, the PSD
// matching certificate, the recursive noise thresholds and the outer-bound
// equality verifier.

#include <limits>
#include <optional>

#include "uncoded/model.hpp"
#include "uncoded/symmat.hpp"

namespace uncoded {

struct MatchCertificate {
  SymMatrix sigma0;  // Sigma_V - Sigma_S + P beta beta^t; doubles as Sigma_W
  bool matched = false;
  LdlTrace ldl;
  double lambda_min = 0.0;

  const SymMatrix& sigma_w() const { return sigma0; }
};

struct DistortionVector {
  Vec d;
};

struct EqualityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |lhs - rhs| / rhs
};

struct Lemma1Result {
  bool ok = true;
  std::vector<std::size_t> violating;  // indices with alpha_i beta_i < 0
};

struct Corollary2Result {
  bool exists = false;
  double lambda2 = 0.0;
  double noise_floor = std::numeric_limits<double>::infinity();
};

struct Corollary3Result {
  bool applicable = false;  // requires diag(alpha) Sigma_S diag(alpha) > 0 entrywise
  Vec thresholds;           // sigma2_z*_m for m = 2..M (index 0 unconstrained, set 0)
};

// Conditional-variance map sigma2 -> P sigma2 / (P + sigma2).
double noise_transform(double p, double sigma2);

// Auxiliary covariance Sigma_V for the scheme/channel pair. Off-diagonals
// carry the minus sign of the derivation, so Sigma_V alpha = 0 exactly.
SymMatrix build_sigma_v(const BcScheme& scheme, const BcChannel& ch);

MatchCertificate certify(const BcScheme& scheme, const BcChannel& ch,
                         const SourceSpec& src, double tol = -1.0);

// Scalar MMSE per receiver: D_m = sigma2_{S_m} - (P beta_m)^2 / (P + sigma2_{Z_m}).
DistortionVector bc_distortions(const BcScheme& scheme, const BcChannel& ch,
                                const SourceSpec& src);

// Evaluates the tightness identity
//   sum_m (s2_m - s2_{m+1}) |Sigma_S + Sigma_W|_{1..m} / prod_{j<=m}(D_j + w_j)
//     = P + s2_1   (s2_{M+1} = 0)
// for a matched certificate; throws std::invalid_argument on nonpositive
// denominators.
EqualityReport verify_outer_bound_equality(const MatchCertificate& cert,
                                           const DistortionVector& dist,
                                           const BcChannel& ch, const SourceSpec& src,
                                           const BcScheme& scheme);

Lemma1Result lemma1_check(const BcScheme& scheme);

Corollary2Result corollary2_existence(const BcScheme& scheme, const SourceSpec& src);

Corollary3Result corollary3_thresholds(const BcScheme& scheme, const SourceSpec& src);

// Minimal sigma2_{Z_m} preserving matchability given the noise powers of the
// receivers after m (ordered best last). Upstream receivers are taken at very
// large noise; bisection on the certify verdict. Returns +infinity when no
// finite noise matches; throws std::runtime_error when the downstream noises
// are themselves infeasible.
double threshold_noise(const BcScheme& scheme, const SourceSpec& src,
                       const Vec& downstream);

// Property-test helper for monotonicity in the noise powers.
bool corollary1_monotone_check(const BcScheme& scheme, const SourceSpec& src,
                               const BcChannel& ch, const BcChannel& ch_plus);

}  // namespace uncoded
