#pragma once

// Region tracing for the three-component example: closed-form eigenvalues,
// the valid correlation region, matched-channel fan sweeps in transformed
// noise coordinates, and the symmetric-case threshold curve.

#include <array>
#include <string>

#include "uncoded/bc_match.hpp"
#include "uncoded/model.hpp"

namespace uncoded {

struct OverlayPoint {
  std::string curve;
  double x = 0.0;
  double y = 0.0;
};

struct SweepGrid {
  Vec x_axis;  // transformed coordinate P s2 / (P + s2) for receiver 2
  Vec y_axis;  // same for receiver 3 (the best receiver)
  std::vector<char> cells;  // row-major, x fastest
  std::vector<OverlayPoint> overlays;

  bool matched(std::size_t ix, std::size_t iy) const {
    return cells[iy * x_axis.size() + ix] != 0;
  }
};

struct GridSpec {
  std::size_t nx = 100, ny = 100;
  double x_lo = 0.0, x_hi = 0.0;  // defaults to (0, P) open interval when 0
  double y_lo = 0.0, y_hi = 0.0;
};

// Three-component source with unit diagonal: row/column pattern
// [[1, r1, r2], [r1, 1, r1], [r2, r1, 1]].
SymMatrix three_component_cov(double rho1, double rho2);

// Closed-form spectrum of the scaled source for alpha = (1,1,1):
// (1, (-2 r1^2 + r2 + 1)/(2 r1^2 + 2 r1 r2 + 3 r1 + r2 + 1), (1 - r2)/(r1 + r2 + 1)).
// Throws std::domain_error when a denominator is nonpositive.
std::array<double, 3> three_component_eigs(double rho1, double rho2);

// r2 < 1, 0 < r1 < 1, r1 + 2 r2 > 0, r2 > 2 r1^2 - 1.
bool valid_rho_region(double rho1, double rho2);

// Fan sweep over receivers 2 and 3 with receiver 1 clamped to receiver 2's
// noise (clamp_first = true) or effectively removed at very large noise.
SweepGrid sweep_fan(const SourceSpec& src, const BcScheme& scheme, const GridSpec& grid,
                    bool clamp_first = true);

// Matching threshold on sigma2_{Z_M} for the symmetric source; +infinity when
// no finite noise matches.
double symmetric_curve(std::size_t m, double rho, double p);

// Cap on worker threads for sweeps (reads UNCODED_MATCH_THREADS).
unsigned sweep_threads();

}  // namespace uncoded
