#include "uncoded/mac_match.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uncoded {

namespace {

// Union-find with parity relative to the root. No path compression so the
// accepted-edge forest stays walkable for cycle reporting.
struct ParityDsu {
  std::vector<std::size_t> parent;
  std::vector<int> rank_;
  std::vector<int> parity;  // 0 same sign as parent, 1 opposite

  explicit ParityDsu(std::size_t n) : parent(n), rank_(n, 0), parity(n, 0) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::pair<std::size_t, int> find(std::size_t x) const {
    int par = 0;
    while (parent[x] != x) {
      par ^= parity[x];
      x = parent[x];
    }
    return {x, par};
  }
  // Returns false on parity conflict.
  bool unite(std::size_t a, std::size_t b, int rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == rel;
    if (rank_[ra] < rank_[rb]) {
      std::swap(ra, rb);
      std::swap(pa, pb);
    }
    parent[rb] = ra;
    parity[rb] = pa ^ pb ^ rel;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    return true;
  }
};

double zero_tol(const SymMatrix& t, std::size_t i, std::size_t j) {
  return 1e-12 * std::sqrt(std::max(0.0, t(i, i)) * std::max(0.0, t(j, j)));
}

double obs_coeff(const MacProblem& p, const MacScheme& s, std::size_t l) {
  return p.delta[l] * s.eta[l] * std::sqrt(p.powers[l] / p.sigma_t(l, l));
}

}  // namespace

SignAssignment sign_assignment(const SymMatrix& sigma_t) {
  const std::size_t l = sigma_t.dim();
  SignAssignment out;
  ParityDsu dsu(l);
  // Accepted constraint edges, for cycle reconstruction on conflict.
  std::vector<std::vector<std::pair<std::size_t, int>>> adj(l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) {
      const double psi = sigma_t(i, j);
      if (std::abs(psi) <= zero_tol(sigma_t, i, j)) continue;
      const int rel = psi > 0.0 ? 0 : 1;
      if (!dsu.unite(i, j, rel)) {
        // Conflict: the violating cycle is the tree path i..j plus edge (i,j).
        std::vector<std::size_t> path;
        std::vector<std::size_t> prev(l, l);
        std::vector<std::size_t> stack{i};
        std::vector<char> seen(l, 0);
        seen[i] = 1;
        while (!stack.empty()) {
          const std::size_t u = stack.back();
          stack.pop_back();
          if (u == j) break;
          for (auto [v, r] : adj[u])
            if (!seen[v]) {
              seen[v] = 1;
              prev[v] = u;
              stack.push_back(v);
            }
        }
        for (std::size_t u = j; u != l; u = prev[u]) out.violating_cycle.push_back(u);
        std::reverse(out.violating_cycle.begin(), out.violating_cycle.end());
        // Canonical orientation: start at the smallest member, walk toward
        // its smaller neighbor.
        auto& cyc = out.violating_cycle;
        const std::size_t n = cyc.size();
        const std::size_t at =
            std::min_element(cyc.begin(), cyc.end()) - cyc.begin();
        std::vector<std::size_t> rot(n);
        for (std::size_t k = 0; k < n; ++k) rot[k] = cyc[(at + k) % n];
        if (n > 2 && rot[n - 1] < rot[1])
          std::reverse(rot.begin() + 1, rot.end());
        cyc = std::move(rot);
        return out;
      }
      adj[i].push_back({j, rel});
      adj[j].push_back({i, rel});
    }
  out.feasible = true;
  out.scheme.eta.assign(l, +1);
  // Canonicalize: the smallest index of each component gets +1.
  std::vector<int> root_sign(l, 0);  // parity of the smallest member seen so far
  std::vector<char> root_set(l, 0);
  for (std::size_t i = 0; i < l; ++i) {
    auto [r, par] = dsu.find(i);
    if (!root_set[r]) {
      root_set[r] = 1;
      root_sign[r] = par;
    }
    out.scheme.eta[i] = ((par ^ root_sign[r]) == 0) ? +1 : -1;
  }
  return out;
}

double coherent_power(const MacProblem& p, const MacScheme& s) {
  (void)s;  // valid for any eta satisfying cond1; the formula uses |psi|
  double total = 0.0;
  for (std::size_t l = 0; l < p.l; ++l) total += p.delta[l] * p.delta[l] * p.powers[l];
  for (std::size_t l = 0; l < p.l; ++l)
    for (std::size_t k = l + 1; k < p.l; ++k) {
      const double rho = std::abs(p.sigma_t(l, k)) /
                         std::sqrt(p.sigma_t(l, l) * p.sigma_t(k, k));
      total += 2.0 * rho * p.delta[l] * p.delta[k] * std::sqrt(p.powers[l] * p.powers[k]);
    }
  return total;
}

MacCertificate certify_mac(const MacProblem& p, const MacScheme& s) {
  if (s.eta.size() != p.l) throw std::invalid_argument("certify_mac: eta length");
  MacCertificate cert;

  cert.cond1 = true;
  for (std::size_t i = 0; i < p.l && cert.cond1; ++i)
    for (std::size_t j = i + 1; j < p.l; ++j)
      if (s.eta[i] * s.eta[j] * p.sigma_t(i, j) < -zero_tol(p.sigma_t, i, j)) {
        cert.cond1 = false;
        break;
      }

  // Gamma = Sigma_{S,T} Sigma_T^{-1} and Sigma_Stilde = Gamma Sigma_{S,T}^t.
  cert.gamma.assign(p.m, Vec(p.l));
  for (std::size_t i = 0; i < p.m; ++i) cert.gamma[i] = solve(p.sigma_t, p.cross[i]);
  cert.sigma_stilde = SymMatrix(p.m);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      cert.sigma_stilde.set(i, j, dot(cert.gamma[i], p.cross[j]));

  Vec v(p.l);
  for (std::size_t l = 0; l < p.l; ++l) v[l] = obs_coeff(p, s, l);
  const Vec w = vec_mat(v, p.sigma_t.rows());  // v^t Sigma_T, length L
  cert.cond2 = in_row_space(w, p.cross, 1e-9);

  cert.coherent_p = coherent_power(p, s);

  if (cert.cond2) {
    // alpha = (C C^t)^{-1} C Sigma_T v, with C the cross covariance.
    SymMatrix gram(p.m);
    for (std::size_t i = 0; i < p.m; ++i)
      for (std::size_t j = 0; j <= i; ++j) gram.set(i, j, dot(p.cross[i], p.cross[j]));
    const Vec cw = mat_vec(p.cross, w);
    cert.alpha_mac = solve(gram, cw);
    // The fit must reproduce w before alpha is accepted.
    const Vec back = vec_mat(cert.alpha_mac, p.cross);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      err = std::max(err, std::abs(back[i] - w[i]));
      scale = std::max(scale, std::abs(w[i]));
    }
    if (err > 1e-9 * std::max(1.0, scale))
      throw std::runtime_error("certify_mac: row-space fit residual too large");
    for (double a : cert.alpha_mac)
      if (a == 0.0) throw std::runtime_error("certify_mac: degenerate scheme, alpha_m = 0");
  }

  if (p.m == 1) {
    cert.lambda2 = 0.0;  // second eigenvalue viewed as zero
    cert.noise_floor = 0.0;
    cert.cond3 = true;
  } else if (cert.cond2) {
    bool pi_ok = true;
    Vec pb = cert.sigma_stilde.mul(cert.alpha_mac);  // plays the role of P beta
    Vec pi(p.m);
    for (std::size_t i = 0; i < p.m; ++i) {
      const double r = cert.alpha_mac[i] / pb[i];
      if (!(r > 0.0)) {
        pi_ok = false;
        break;
      }
      pi[i] = std::sqrt(r);
    }
    if (!pi_ok) {
      cert.cond3 = false;
      cert.lambda2 = 1.0;
      cert.noise_floor = std::numeric_limits<double>::infinity();
    } else {
      SymMatrix scaled(p.m);
      for (std::size_t i = 0; i < p.m; ++i)
        for (std::size_t j = 0; j <= i; ++j)
          scaled.set(i, j, pi[i] * cert.sigma_stilde(i, j) * pi[j]);
      const EigenReport e = eig_sym(scaled);
      cert.lambda2 = e.eigenvalues[1];
      cert.noise_floor =
          cert.lambda2 >= 1.0 ? std::numeric_limits<double>::infinity()
          : cert.lambda2 <= 0.0
              ? 0.0
              : cert.lambda2 * cert.coherent_p / (1.0 - cert.lambda2);
      cert.cond3 = p.noise >= cert.noise_floor;
    }
  }

  cert.matched = cert.cond1 && cert.cond2 && cert.cond3;
  return cert;
}

ProportionalityResult ceo_proportional_check(const CeoModel& c) {
  ProportionalityResult r;
  for (double d : c.d)
    if (!(d > 0.0)) return r;  // not applicable
  r.applicable = true;
  r.ratios.resize(c.d.size());
  for (std::size_t l = 0; l < c.d.size(); ++l) {
    const double d2 = c.d[l] * c.d[l];
    r.ratios[l] = c.powers[l] * c.delta[l] * c.delta[l] /
                  ((d2 * c.sigma2_s + c.sigma2_obs) * d2);
  }
  const double lo = *std::min_element(r.ratios.begin(), r.ratios.end());
  const double hi = *std::max_element(r.ratios.begin(), r.ratios.end());
  r.proportional = hi - lo <= 1e-9 * std::max(1.0, hi);
  return r;
}

MacDistortion mac_distortions(const MacProblem& p, const MacScheme& s) {
  MacDistortion out;
  out.delta_floor.resize(p.m);
  out.d.resize(p.m);

  Vec v(p.l);
  for (std::size_t l = 0; l < p.l; ++l) v[l] = obs_coeff(p, s, l);
  const double var_x = quad_form(v, p.sigma_t);

  for (std::size_t m = 0; m < p.m; ++m) {
    const Vec gi = solve(p.sigma_t, p.cross[m]);
    out.delta_floor[m] = p.sigma_s(m, m) - dot(gi, p.cross[m]);
    const double cov = dot(p.cross[m], v);  // Cov(S_m, Xtilde)
    out.d[m] = p.sigma_s(m, m) - cov * cov / (var_x + p.noise);
  }
  return out;
}

}  // namespace uncoded
