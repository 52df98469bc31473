#pragma once

// Problem specifications and validation: sources, broadcast channels and
// uncoded schemes, MAC/CEO observation structures.

#include <string>
#include <vector>

#include "uncoded/symmat.hpp"

namespace uncoded {

// Relative full-rank threshold: lambda_min > kRankTol * lambda_max.
inline constexpr double kRankTol = 1e-10;

struct SourceSpec {
  std::size_t m = 0;
  SymMatrix sigma_s;  // full-rank PSD covariance
};

struct BcChannel {
  Vec noise_powers;  // non-increasing, strictly positive
};

// Uncoded broadcast scheme. beta is stored at construction so every
// downstream module shares one rounding of beta = (1/P) Sigma_S alpha.
struct BcScheme {
  Vec alpha;
  Vec beta;
  double p = 0.0;
};

struct MacProblem {
  std::size_t m = 0;  // source dimension
  std::size_t l = 0;  // sensor count, m <= l
  SymMatrix sigma_s;
  SymMatrix sigma_t;   // entries psi_{i,j}
  Mat cross;           // m x l cross covariance between sources and sensors
  Vec delta;           // channel gains, > 0
  Vec powers;          // per-sensor transmit powers, > 0
  double noise = 0.0;  // channel noise variance
};

struct CeoModel {
  double sigma2_s = 0.0;
  Vec d;                  // observation gains, >= 0, at least one > 0
  double sigma2_obs = 0.0;
  Vec delta;
  Vec powers;
  double noise = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Scale `direction` so the transmit power hits p_target and derive beta.
// Throws std::invalid_argument on a zero direction entry or p_target <= 0.
BcScheme normalize_alpha(const Vec& direction, const SourceSpec& src, double p_target);

SourceSpec make_source(const SymMatrix& sigma_s);

// Expand a scalar CEO model into the general MAC observation structure.
MacProblem ceo_to_mac(const CeoModel& c);

ValidationReport validate(const SourceSpec& s);
ValidationReport validate(const BcChannel& c);
ValidationReport validate(const BcScheme& s, const SourceSpec& src);
ValidationReport validate(const MacProblem& p);
ValidationReport validate(const CeoModel& c);

}  // namespace uncoded
