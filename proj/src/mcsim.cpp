#include "uncoded/mcsim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "uncoded/analysis.hpp"
#include "uncoded/bc_match.hpp"
#include "uncoded/kernels.hpp"
#include "uncoded/rng.hpp"

namespace uncoded {

namespace {

constexpr std::size_t kChunkBlocks = 64;

// Row-major lower-triangular factor: cov = f f^t. Cholesky with zero-pivot
// skipping so semidefinite boundary covariances stay samplable. Triangular
// mixing concentrates each output on few normals, which is what lets the
// per-coordinate magnitude stratification bite.
Vec sym_factor(const SymMatrix& cov) {
  const std::size_t n = cov.dim();
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(cov(i, i)));
  Vec f(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = cov(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= f[j * n + k] * f[j * n + k];
    if (d < -1e-8 * scale)
      throw std::invalid_argument("covariance is not positive semidefinite");
    if (d <= 1e-12 * scale) continue;  // rank-deficient direction
    const double p = std::sqrt(d);
    f[j * n + j] = p;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = cov(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= f[i * n + k] * f[j * n + k];
      f[i * n + j] = s / p;
    }
  }
  return f;
}

// Fill one block of normals, coordinate-major: z[j * kBlock + k] is
// coordinate j of the k-th sample in the block.
void fill_block_plain(std::uint64_t seed, std::uint64_t block, std::size_t dim,
                      double* z) {
  const std::uint64_t s0 = block * kBlock;
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = 0; k < kBlock; ++k)
      z[j * kBlock + k] = rng_normal(seed, (s0 + k) * dim + j);
}

// Stratified magnitudes: each coordinate of a block draws one |z| from each
// of kBlock equiprobable half-normal strata (random permutation, fresh
// random signs). Counter budget per (block, coordinate): 96 words.
void fill_block_strat(std::uint64_t seed, std::uint64_t block, std::size_t dim,
                      double* z) {
  for (std::size_t j = 0; j < dim; ++j) {
    const std::uint64_t base = (block * dim + j) * 96;
    std::array<std::size_t, kBlock> idx;
    std::array<std::uint64_t, kBlock> key;
    for (std::size_t k = 0; k < kBlock; ++k) {
      idx[k] = k;
      key[k] = rng_word(seed, base + k);
    }
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    std::array<std::size_t, kBlock> rank;
    for (std::size_t r = 0; r < kBlock; ++r) rank[idx[r]] = r;
    for (std::size_t k = 0; k < kBlock; ++k) {
      const double u = (static_cast<double>(rank[k]) + rng_unit(seed, base + kBlock + k)) /
                       static_cast<double>(kBlock);
      const double mag = inv_normal_cdf(0.5 * (1.0 + u));
      const double sgn = (rng_word(seed, base + 2 * kBlock + k) >> 63) ? -1.0 : 1.0;
      z[j * kBlock + k] = sgn * mag;
    }
  }
}

struct SimCore {
  std::size_t dim = 0;    // normals per sample
  std::size_t nchan = 0;  // squared-value channels in the accumulator
  std::function<void(const double* group, double* acc)> run;
};

// Per-block sums of v^2 and v^4 for each channel, lanes reduced in order.
void process_block(const SimCore& core, const SimConfig& cfg, std::uint64_t block,
                   Vec& zblock, Vec& group, Vec& acc, double* e2, double* e4) {
  if (cfg.antithetic)
    fill_block_strat(cfg.seed, block, core.dim, zblock.data());
  else
    fill_block_plain(cfg.seed, block, core.dim, zblock.data());
  std::fill(acc.begin(), acc.end(), 0.0);
  for (std::size_t g = 0; g < kBlock / kLanes; ++g) {
    for (std::size_t j = 0; j < core.dim; ++j)
      for (std::size_t lane = 0; lane < kLanes; ++lane)
        group[j * kLanes + lane] = zblock[j * kBlock + g * kLanes + lane];
    core.run(group.data(), acc.data());
  }
  for (std::size_t c = 0; c < core.nchan; ++c) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      s2 += acc[c * 2 * kLanes + lane];
      s4 += acc[c * 2 * kLanes + kLanes + lane];
    }
    e2[c] = s2;
    e4[c] = s4;
  }
}

// Runs the whole sample budget and fills means and standard errors per
// channel. Work is split into fixed-size chunks of blocks reduced in chunk
// order, so totals do not depend on the thread count.
void run_sim(const SimCore& core, const SimConfig& cfg, Vec& mean, Vec& se,
             std::uint64_t& n_used) {
  if (cfg.n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  const std::uint64_t nblocks = (cfg.n_samples + kBlock - 1) / kBlock;
  if (cfg.antithetic && nblocks < 2)
    throw std::invalid_argument("antithetic mode needs at least two blocks (64 samples)");
  n_used = nblocks * kBlock;
  const std::size_t nc = core.nchan;
  const std::uint64_t nchunks = (nblocks + kChunkBlocks - 1) / kChunkBlocks;
  // Per chunk: [sum v^2 | sum v^4 | sum (block sum v^2)^2] per channel.
  std::vector<Vec> partial(nchunks, Vec(3 * nc, 0.0));

  auto worker = [&](std::atomic<std::uint64_t>& next) {
    Vec zblock(core.dim * kBlock), group(core.dim * kLanes), acc(nc * 2 * kLanes);
    Vec e2(nc), e4(nc);
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) break;
      Vec& out = partial[c];
      const std::uint64_t b_hi = std::min<std::uint64_t>((c + 1) * kChunkBlocks, nblocks);
      for (std::uint64_t b = c * kChunkBlocks; b < b_hi; ++b) {
        process_block(core, cfg, b, zblock, group, acc, e2.data(), e4.data());
        for (std::size_t i = 0; i < nc; ++i) {
          out[i] += e2[i];
          out[nc + i] += e4[i];
          out[2 * nc + i] += e2[i] * e2[i];
        }
      }
    }
  };

  std::atomic<std::uint64_t> next{0};
  const unsigned nt = std::min<unsigned>(
      sweep_threads(), static_cast<unsigned>(std::min<std::uint64_t>(nchunks, 64)));
  if (nt <= 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back([&] { worker(next); });
    for (auto& th : pool) th.join();
  }

  Vec tot(3 * nc, 0.0);
  for (std::uint64_t c = 0; c < nchunks; ++c)
    for (std::size_t i = 0; i < 3 * nc; ++i) tot[i] += partial[c][i];

  const double n = static_cast<double>(n_used);
  const double nb = static_cast<double>(nblocks);
  mean.assign(nc, 0.0);
  se.assign(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    mean[i] = tot[i] / n;
    if (cfg.antithetic) {
      // Block sums are i.i.d.; the sample variance across blocks gives the
      // standard error of the overall mean.
      const double ms = tot[i] / nb;
      const double var_s = std::max(0.0, (tot[2 * nc + i] / nb - ms * ms)) * nb / (nb - 1.0);
      se[i] = std::sqrt(var_s / nb) / static_cast<double>(kBlock);
    } else {
      const double var = std::max(0.0, tot[nc + i] / n - mean[i] * mean[i]);
      se[i] = std::sqrt(var / (n - 1.0));
    }
  }
}

SimReport assemble(const SimCore& core, const SimConfig& cfg, std::size_t m,
                   Vec closed_d, Vec closed_power) {
  Vec mean, se;
  std::uint64_t n_used = 0;
  run_sim(core, cfg, mean, se, n_used);
  SimReport r;
  r.empirical_d.assign(mean.begin(), mean.begin() + m);
  r.stderr_d.assign(se.begin(), se.begin() + m);
  r.empirical_power.assign(mean.begin() + m, mean.end());
  r.stderr_power.assign(se.begin() + m, se.end());
  r.closed_d = std::move(closed_d);
  r.closed_power = std::move(closed_power);
  r.n_used = n_used;
  r.backend = kernel_backend();
  return r;
}

}  // namespace

double SimReport::max_z() const {
  double z = 0.0;
  auto scan = [&](const Vec& emp, const Vec& ref, const Vec& se) {
    for (std::size_t i = 0; i < emp.size(); ++i) {
      const double d = std::abs(emp[i] - ref[i]);
      const double s = std::max(se[i], 1e-300);
      z = std::max(z, d / s);
    }
  };
  scan(empirical_d, closed_d, stderr_d);
  scan(empirical_power, closed_power, stderr_power);
  return z;
}

SimReport simulate_bc(const BcScheme& scheme, const BcChannel& ch,
                      const SourceSpec& src, const SimConfig& cfg) {
  const std::size_t m = src.m;
  if (2 * m > kMaxDim) throw std::invalid_argument("source dimension too large");
  const Vec mix = sym_factor(src.sigma_s);
  Vec gain(m), noise_sd(m);
  for (std::size_t i = 0; i < m; ++i) {
    gain[i] = scheme.p * scheme.beta[i] / (scheme.p + ch.noise_powers[i]);
    noise_sd[i] = std::sqrt(ch.noise_powers[i]);
  }
  BcKernelInput in;
  in.m = m;
  in.mix = mix.data();
  in.alpha = scheme.alpha.data();
  in.gain = gain.data();
  in.noise_sd = noise_sd.data();
  const BcGroupFn fn = bc_group_fn();

  SimCore core;
  core.dim = 2 * m;
  core.nchan = m + 1;
  core.run = [in, fn, m](const double* group, double* acc) {
    fn(in, group, group + m * kLanes, acc);
  };
  return assemble(core, cfg, m, bc_distortions(scheme, ch, src).d, Vec{scheme.p});
}

SimReport simulate_mac(const MacProblem& p, const MacScheme& s, const SimConfig& cfg) {
  const std::size_t m = p.m, l = p.l, d = m + l;
  if (d + 1 > kMaxDim) throw std::invalid_argument("joint dimension too large");
  SymMatrix joint(d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) joint.set(i, j, p.sigma_s(i, j));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < l; ++k) joint.set(i, m + k, p.cross[i][k]);
  for (std::size_t k = 0; k < l; ++k)
    for (std::size_t k2 = k; k2 < l; ++k2) joint.set(m + k, m + k2, p.sigma_t(k, k2));
  const Vec mix = sym_factor(joint);

  Vec coeff(l);
  for (std::size_t k = 0; k < l; ++k)
    coeff[k] = s.eta[k] * std::sqrt(p.powers[k] / p.sigma_t(k, k));
  double var_x = 0.0;
  for (std::size_t k = 0; k < l; ++k)
    for (std::size_t k2 = 0; k2 < l; ++k2)
      var_x += p.delta[k] * coeff[k] * p.delta[k2] * coeff[k2] * p.sigma_t(k, k2);
  Vec gain(m);
  for (std::size_t i = 0; i < m; ++i) {
    double cov = 0.0;
    for (std::size_t k = 0; k < l; ++k) cov += p.delta[k] * coeff[k] * p.cross[i][k];
    gain[i] = cov / (var_x + p.noise);
  }

  MacKernelInput in;
  in.m = m;
  in.l = l;
  in.mix = mix.data();
  in.coeff = coeff.data();
  in.delta = p.delta.data();
  in.gain = gain.data();
  in.noise_sd = std::sqrt(p.noise);
  const MacGroupFn fn = mac_group_fn();

  SimCore core;
  core.dim = d + 1;
  core.nchan = m + l;
  core.run = [in, fn](const double* group, double* acc) { fn(in, group, acc); };
  return assemble(core, cfg, m, mac_distortions(p, s).d, p.powers);
}

}  // namespace uncoded
