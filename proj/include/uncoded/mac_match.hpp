#pragma once

// Multiple-access / CEO matching: sign assignment over the observation
// correlation graph, the row-space condition, derived combining coefficients,
// coherent power and the eigenvalue noise threshold.

#include <limits>
#include <optional>

#include "uncoded/model.hpp"
#include "uncoded/symmat.hpp"

namespace uncoded {

struct MacScheme {
  std::vector<int> eta;  // +1 / -1 per sensor
};

struct SignAssignment {
  bool feasible = false;
  MacScheme scheme;
  std::vector<std::size_t> violating_cycle;  // odd negative cycle when infeasible
};

struct MacCertificate {
  bool cond1 = false;  // coherent combining: eta_l eta_l' psi_{ll'} >= 0
  bool cond2 = false;  // observation vector in the row space of the cross covariance
  bool cond3 = false;  // noise above the eigenvalue floor
  Mat gamma;           // MMSE weights Sigma_{S,T} Sigma_T^{-1}
  SymMatrix sigma_stilde;
  Vec alpha_mac;
  double coherent_p = 0.0;
  double lambda2 = 0.0;
  double noise_floor = 0.0;
  bool matched = false;
};

struct ProportionalityResult {
  bool applicable = false;  // needs all d_l > 0
  bool proportional = false;
  Vec ratios;
};

struct MacDistortion {
  Vec delta_floor;  // remote MMSE floors
  Vec d;            // total distortions
};

// Two-colors the signed constraint graph (edges where |psi| is above the
// relative zero tolerance) with parity union-find; canonical solution sets
// eta = +1 on the smallest index of each connected component.
SignAssignment sign_assignment(const SymMatrix& sigma_t);

// P = sum delta_l^2 P_l + 2 sum_{l<l'} rho*_{ll'} delta_l delta_l' sqrt(P_l P_l').
double coherent_power(const MacProblem& p, const MacScheme& s);

MacCertificate certify_mac(const MacProblem& p, const MacScheme& s);

// Ratio test P_l delta_l^2 / ((d_l^2 s2_S + s2_obs) d_l^2) == const.
ProportionalityResult ceo_proportional_check(const CeoModel& c);

MacDistortion mac_distortions(const MacProblem& p, const MacScheme& s);

}  // namespace uncoded
