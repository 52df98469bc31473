#pragma once

// Monte Carlo validation of the closed-form distortions and transmit powers.
// Samples are generated from counter-based words, so results are reproducible
// bit for bit regardless of thread count; the inner accumulation runs through
// the runtime-dispatched kernels.

#include <cstdint>
#include <string>

#include "uncoded/mac_match.hpp"
#include "uncoded/model.hpp"

namespace uncoded {

struct SimConfig {
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  // Variance reduction: per-coordinate magnitude stratification over each
  // 32-sample block (Latin-hypercube strata with fresh random signs).
  bool antithetic = false;
};

struct SimReport {
  Vec empirical_d;
  Vec stderr_d;
  Vec closed_d;
  Vec empirical_power;  // one entry for the broadcast input, per sensor for MAC
  Vec stderr_power;
  Vec closed_power;
  std::uint64_t n_used = 0;  // n_samples rounded up to a whole block
  std::string backend;

  // max_m |empirical - closed| / stderr
  double max_z() const;
};

SimReport simulate_bc(const BcScheme& scheme, const BcChannel& ch,
                      const SourceSpec& src, const SimConfig& cfg);

SimReport simulate_mac(const MacProblem& p, const MacScheme& s, const SimConfig& cfg);

}  // namespace uncoded
