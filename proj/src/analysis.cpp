#include "uncoded/analysis.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace uncoded {

SymMatrix three_component_cov(double rho1, double rho2) {
  SymMatrix s(3);
  s.set(0, 0, 1.0);
  s.set(1, 1, 1.0);
  s.set(2, 2, 1.0);
  s.set(0, 1, rho1);
  s.set(1, 2, rho1);
  s.set(0, 2, rho2);
  return s;
}

std::array<double, 3> three_component_eigs(double rho1, double rho2) {
  const double den2 = 2.0 * rho1 * rho1 + 2.0 * rho1 * rho2 + 3.0 * rho1 + rho2 + 1.0;
  const double den3 = rho1 + rho2 + 1.0;
  if (den2 <= 0.0 || den3 <= 0.0)
    throw std::domain_error("three_component_eigs: denominator <= 0");
  return {1.0, (-2.0 * rho1 * rho1 + rho2 + 1.0) / den2, (1.0 - rho2) / den3};
}

bool valid_rho_region(double rho1, double rho2) {
  return rho2 < 1.0 && rho1 > 0.0 && rho1 < 1.0 && rho1 + 2.0 * rho2 > 0.0 &&
         rho2 > 2.0 * rho1 * rho1 - 1.0;
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UNCODED_MATCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(std::min<long>(v, 256));
  }
  return n;
}

SweepGrid sweep_fan(const SourceSpec& src, const BcScheme& scheme, const GridSpec& grid,
                    bool clamp_first) {
  if (src.m != 3) throw std::invalid_argument("sweep_fan: needs a 3-component source");
  const double p = scheme.p;
  double x_lo = grid.x_lo, x_hi = grid.x_hi, y_lo = grid.y_lo, y_hi = grid.y_hi;
  if (x_hi <= x_lo) {
    x_lo = p / (grid.nx + 1.0);
    x_hi = p * grid.nx / (grid.nx + 1.0);
  }
  if (y_hi <= y_lo) {
    y_lo = p / (grid.ny + 1.0);
    y_hi = p * grid.ny / (grid.ny + 1.0);
  }
  if (x_lo <= 0.0 || x_hi >= p || y_lo <= 0.0 || y_hi >= p)
    throw std::invalid_argument("sweep_fan: coordinates must lie in (0, P)");

  SweepGrid out;
  out.x_axis.resize(grid.nx);
  out.y_axis.resize(grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i)
    out.x_axis[i] = grid.nx == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (grid.nx - 1.0);
  for (std::size_t j = 0; j < grid.ny; ++j)
    out.y_axis[j] = grid.ny == 1 ? y_lo : y_lo + (y_hi - y_lo) * j / (grid.ny - 1.0);
  out.cells.assign(grid.nx * grid.ny, 0);

  const double big = 1e12 * std::max(1.0, p);
  auto inv = [p](double c) { return c * p / (p - c); };

  auto eval_rows = [&](std::size_t j0, std::size_t j1) {
    for (std::size_t j = j0; j < j1; ++j) {
      const double y = out.y_axis[j];
      for (std::size_t i = 0; i < grid.nx; ++i) {
        const double x = out.x_axis[i];
        if (y > x) continue;  // degradedness order requires s2_{Z3} <= s2_{Z2}
        BcChannel ch;
        const double s2_2 = inv(x);
        const double s2_3 = inv(y);
        ch.noise_powers = {clamp_first ? s2_2 : big, s2_2, s2_3};
        out.cells[j * grid.nx + i] = certify(scheme, ch, src).matched ? 1 : 0;
      }
    }
  };

  const unsigned nt = std::min<unsigned>(sweep_threads(), grid.ny);
  if (nt <= 1) {
    eval_rows(0, grid.ny);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (grid.ny + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      const std::size_t j0 = t * chunk;
      const std::size_t j1 = std::min<std::size_t>(grid.ny, j0 + chunk);
      if (j0 < j1) workers.emplace_back(eval_rows, j0, j1);
    }
    for (auto& w : workers) w.join();
  }

  // Analytic overlays.
  const Corollary2Result c2 = corollary2_existence(scheme, src);
  if (c2.exists)
    out.overlays.push_back({"corollary2_point", p * c2.lambda2, p * c2.lambda2});
  for (std::size_t i = 0; i < grid.nx; ++i)
    out.overlays.push_back({"degraded_boundary", out.x_axis[i], out.x_axis[i]});
  // First-pivot bound on receiver 3: in transformed coordinates the condition
  // on the last diagonal entry of the certificate matrix is a horizontal line.
  {
    const Vec& a = scheme.alpha;
    const Vec& b = scheme.beta;
    const double head = a[0] * b[0] + a[1] * b[1];
    if (b[2] * head > 0.0) {
      const double y0 =
          (src.sigma_s(2, 2) - p * b[2] * b[2]) * a[2] / (b[2] * head);
      if (y0 > 0.0 && y0 < p)
        for (std::size_t i = 0; i < grid.nx; ++i)
          out.overlays.push_back({"first_pivot_bound", out.x_axis[i], y0});
    }
  }
  return out;
}

double symmetric_curve(std::size_t m, double rho, double p) {
  if (m < 2) throw std::invalid_argument("symmetric_curve: need M >= 2");
  if (rho <= -1.0 / (m - 1.0) || rho >= 1.0)
    throw std::invalid_argument("symmetric_curve: symmetric source not PSD");
  const double t = (1.0 - rho) / (1.0 + (m - 1.0) * rho);
  if (t >= 1.0) return std::numeric_limits<double>::infinity();
  return p * t / (1.0 - t);
}

}  // namespace uncoded
