// uncoded-match: certify channel/source matching for uncoded linear schemes,
// trace matched regions, and cross-check distortions by simulation.
//
// Exit codes: 0 matched (or simulation within the z gate), 1 not matched,
// 2 invalid input or runtime error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uncoded/analysis.hpp"
#include "uncoded/bc_match.hpp"
#include "uncoded/mac_match.hpp"
#include "uncoded/mcsim.hpp"
#include "uncoded/model.hpp"

using nlohmann::json;
using namespace uncoded;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string spec_path;
  bool machine = false;
  double tol = -1.0;
  std::string grid = "100x100";
  std::string x_range, y_range;
  std::string out = "sweep.csv";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 12345;
  bool antithetic = false;
};

std::string fmt(double v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void line_col(const std::string& text, std::size_t byte, std::size_t& line,
              std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

json parse_spec(const std::string& path, std::string& raw) {
  raw = read_file(path);
  try {
    return json::parse(raw);
  } catch (const json::parse_error& e) {
    std::size_t line = 0, col = 0;
    line_col(raw, e.byte, line, col);
    throw std::runtime_error(path + ":" + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + e.what());
  }
}

Vec get_vec(const json& j, const std::string& key) {
  return j.at(key).get<Vec>();
}

SymMatrix get_sym(const json& j, const std::string& key) {
  const Mat rows = j.at(key).get<Mat>();
  return SymMatrix::from_rows(rows);
}

json manifest(const std::string& command, const std::string& raw,
              std::chrono::steady_clock::time_point t0, json seeds = json::array()) {
  const auto ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a(raw)));
  return json{{"command", command},
              {"input_digest", digest},
              {"version", kVersion},
              {"seeds", seeds},
              {"wall_time_ms", ms}};
}

void require_kind(const json& spec, const std::string& kind) {
  if (spec.at("kind").get<std::string>() != kind)
    throw std::runtime_error("spec kind must be \"" + kind + "\"");
}

void check(const ValidationReport& r, const std::string& what) {
  if (r.ok()) return;
  std::string msg = "invalid " + what;
  for (const auto& v : r.violations) msg += "\n  " + v;
  throw std::runtime_error(msg);
}

struct BcInputs {
  SourceSpec src;
  BcScheme scheme;
};

BcInputs load_bc(const json& spec) {
  BcInputs in;
  in.src = make_source(get_sym(spec, "sigma_s"));
  check(validate(in.src), "sigma_s");
  in.scheme = normalize_alpha(get_vec(spec, "alpha_direction"), in.src,
                              spec.at("power").get<double>());
  check(validate(in.scheme, in.src), "scheme");
  return in;
}

struct MacInputs {
  MacProblem prob;
  bool is_ceo = false;
  CeoModel ceo;
};

MacInputs load_mac(const json& spec) {
  MacInputs in;
  if (spec.at("kind") == "ceo") {
    in.is_ceo = true;
    in.ceo.sigma2_s = spec.at("sigma2_s").get<double>();
    in.ceo.d = get_vec(spec, "d");
    in.ceo.sigma2_obs = spec.at("sigma2_obs").get<double>();
    in.ceo.delta = get_vec(spec, "delta");
    in.ceo.powers = get_vec(spec, "sensor_powers");
    in.ceo.noise = spec.at("noise").get<double>();
    check(validate(in.ceo), "ceo model");
    in.prob = ceo_to_mac(in.ceo);
  } else {
    in.prob.sigma_s = get_sym(spec, "sigma_s");
    in.prob.sigma_t = get_sym(spec, "sigma_t");
    in.prob.cross = spec.at("cross").get<Mat>();
    in.prob.delta = get_vec(spec, "delta");
    in.prob.powers = get_vec(spec, "sensor_powers");
    in.prob.noise = spec.at("noise").get<double>();
    in.prob.m = in.prob.sigma_s.dim();
    in.prob.l = in.prob.sigma_t.dim();
  }
  check(validate(in.prob), "mac problem");
  return in;
}

std::string join_indices(const std::vector<std::size_t>& ix) {
  std::string s;
  for (std::size_t i = 0; i < ix.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(ix[i] + 1);
  }
  return s;
}

int cmd_bc_certify(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw;
  const json spec = parse_spec(opt.spec_path, raw);
  require_kind(spec, "bc");
  const BcInputs in = load_bc(spec);
  BcChannel ch{get_vec(spec, "noise_powers")};
  check(validate(ch), "noise_powers");
  if (ch.noise_powers.size() != in.src.m)
    throw std::runtime_error("noise_powers size mismatch");

  const MatchCertificate cert = certify(in.scheme, ch, in.src, opt.tol);
  const DistortionVector dist = bc_distortions(in.scheme, ch, in.src);
  const EigenReport eg = eig_sym(cert.sigma0);
  json gap = nullptr;
  if (cert.matched) {
    const EqualityReport eq =
        verify_outer_bound_equality(cert, dist, ch, in.src, in.scheme);
    gap = eq.gap;
  }
  const Corollary2Result c2 = corollary2_existence(in.scheme, in.src);
  const Corollary3Result c3 = corollary3_thresholds(in.scheme, in.src);
  json thresholds = {{"corollary2_floor", c2.exists ? json(c2.noise_floor) : json()},
                     {"corollary3", c3.applicable ? json(c3.thresholds) : json()}};

  if (opt.machine) {
    json out = {{"verdict", cert.matched ? "matched" : "not_matched"},
                {"conditions", {{"psd", cert.ldl.psd()}}},
                {"eigenvalues", eg.eigenvalues},
                {"distortions", dist.d},
                {"gap", gap},
                {"thresholds", thresholds},
                {"manifest", manifest("bc-certify", raw, t0)}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << (cert.matched ? "matched" : "not matched") << "\n";
    std::cout << "sigma0 eigenvalues:";
    for (double v : eg.eigenvalues) std::cout << " " << fmt(v, 6);
    std::cout << "\ndistortions:";
    for (double v : dist.d) std::cout << " " << fmt(v, 6);
    std::cout << "\n";
    if (cert.matched)
      std::cout << "outer-bound gap: " << fmt(gap.get<double>(), 6) << "\n";
    std::cout << "manifest: " << manifest("bc-certify", raw, t0).dump() << "\n";
  }
  return cert.matched ? 0 : 1;
}

int cmd_mac_certify(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw;
  const json spec = parse_spec(opt.spec_path, raw);
  if (spec.at("kind") != "mac" && spec.at("kind") != "ceo")
    throw std::runtime_error("spec kind must be \"mac\" or \"ceo\"");
  const MacInputs in = load_mac(spec);

  MacScheme scheme;
  std::string sign_note;
  if (spec.contains("eta")) {
    scheme.eta = spec.at("eta").get<std::vector<int>>();
    if (scheme.eta.size() != in.prob.l)
      throw std::runtime_error("eta size mismatch");
    for (int e : scheme.eta)
      if (e != 1 && e != -1) throw std::runtime_error("eta entries must be +1/-1");
  } else {
    const SignAssignment sa = sign_assignment(in.prob.sigma_t);
    if (!sa.feasible) {
      sign_note = "condition 1 infeasible: odd negative cycle (" +
                  join_indices(sa.violating_cycle) + ")";
      scheme.eta.assign(in.prob.l, 1);
    } else {
      scheme = sa.scheme;
    }
  }

  const MacCertificate cert = certify_mac(in.prob, scheme);
  const MacDistortion dist = mac_distortions(in.prob, scheme);
  const EigenReport eg = eig_sym(cert.sigma_stilde);
  const bool matched = sign_note.empty() && cert.matched;
  json thresholds = {{"lambda2", cert.lambda2}, {"noise_floor", cert.noise_floor}};
  json conditions = {{"cond1", sign_note.empty() && cert.cond1},
                     {"cond2", cert.cond2},
                     {"cond3", cert.cond3}};

  if (opt.machine) {
    json out = {{"verdict", matched ? "matched" : "not_matched"},
                {"conditions", conditions},
                {"eigenvalues", eg.eigenvalues},
                {"distortions", dist.d},
                {"gap", nullptr},
                {"thresholds", thresholds},
                {"manifest", manifest("mac-certify", raw, t0)}};
    if (!sign_note.empty()) out["sign_note"] = sign_note;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << (matched ? "matched" : "not matched") << "\n";
    if (!sign_note.empty()) std::cout << sign_note << "\n";
    std::cout << "cond1 (coherent signs): " << (conditions["cond1"].get<bool>() ? "true" : "false")
              << "\ncond2 (row space): " << (cert.cond2 ? "true" : "false")
              << "\ncond3 (noise floor " << fmt(cert.noise_floor, 6)
              << "): " << (cert.cond3 ? "true" : "false") << "\n";
    std::cout << "distortions:";
    for (double v : dist.d) std::cout << " " << fmt(v, 6);
    std::cout << "\nremote floors:";
    for (double v : dist.delta_floor) std::cout << " " << fmt(v, 6);
    std::cout << "\nmanifest: " << manifest("mac-certify", raw, t0).dump() << "\n";
  }
  return matched ? 0 : 1;
}

void parse_range(const std::string& s, double& lo, double& hi) {
  if (s.empty()) return;
  const auto p = s.find(':');
  if (p == std::string::npos) throw std::runtime_error("range must be a:b");
  lo = std::stod(s.substr(0, p));
  hi = std::stod(s.substr(p + 1));
}

void parse_grid(const std::string& s, std::size_t& nx, std::size_t& ny) {
  const auto p = s.find('x');
  if (p == std::string::npos) throw std::runtime_error("grid must be WxH");
  nx = std::stoul(s.substr(0, p));
  ny = std::stoul(s.substr(p + 1));
  if (nx == 0 || ny == 0) throw std::runtime_error("grid must be positive");
}

std::string sibling(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  const std::string stem = dot == std::string::npos ? out : out.substr(0, dot);
  return stem + suffix;
}

void write_or_throw(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

int cmd_sweep(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw;
  const json spec = parse_spec(opt.spec_path, raw);
  require_kind(spec, "bc");
  const json sweep = spec.value("sweep", json::object());
  const std::string mode = sweep.value("mode", "fan");

  GridSpec grid;
  parse_grid(opt.grid, grid.nx, grid.ny);
  parse_range(opt.x_range, grid.x_lo, grid.x_hi);
  parse_range(opt.y_range, grid.y_lo, grid.y_hi);

  std::ostringstream region, overlay;
  region << "x,y,matched\n";
  overlay << "curve,x,y\n";
  char buf[64];
  auto put = [&](std::ostringstream& os, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };

  if (mode == "fan") {
    const BcInputs in = load_bc(spec);
    const bool clamp = sweep.value("clamp_first", true);
    const SweepGrid g = sweep_fan(in.src, in.scheme, grid, clamp);
    for (std::size_t iy = 0; iy < g.y_axis.size(); ++iy)
      for (std::size_t ix = 0; ix < g.x_axis.size(); ++ix) {
        put(region, g.x_axis[ix]);
        region << ",";
        put(region, g.y_axis[iy]);
        region << "," << (g.matched(ix, iy) ? 1 : 0) << "\n";
      }
    for (const auto& p : g.overlays) {
      overlay << p.curve << ",";
      put(overlay, p.x);
      overlay << ",";
      put(overlay, p.y);
      overlay << "\n";
    }
  } else if (mode == "rho_region") {
    // Classify (rho1, rho2) by the existence of a finite matched noise level
    // for the three-component source with alpha direction (1,1,1).
    double x_lo = grid.x_lo, x_hi = grid.x_hi, y_lo = grid.y_lo, y_hi = grid.y_hi;
    if (x_lo == 0.0 && x_hi == 0.0) {
      x_lo = -1.0;
      x_hi = 1.0;
    }
    if (y_lo == 0.0 && y_hi == 0.0) {
      y_lo = -1.0;
      y_hi = 1.0;
    }
    const double p_target = spec.value("power", 3.0);
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      const double r2 = y_lo + (y_hi - y_lo) * (iy + 0.5) / grid.ny;
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const double r1 = x_lo + (x_hi - x_lo) * (ix + 0.5) / grid.nx;
        bool ok = false;
        try {
          const SymMatrix cov = three_component_cov(r1, r2);
          const SourceSpec src = make_source(cov);
          if (validate(src).ok()) {
            const BcScheme sch = normalize_alpha({1.0, 1.0, 1.0}, src, p_target);
            ok = corollary2_existence(sch, src).exists;
          }
        } catch (const std::exception&) {
          // Invalid correlation pairs (non-PSD source) are simply unmatched.
        }
        put(region, r1);
        region << ",";
        put(region, r2);
        region << "," << (ok ? 1 : 0) << "\n";
      }
    }
  } else {
    throw std::runtime_error("unknown sweep mode: " + mode);
  }

  write_or_throw(opt.out, region.str());
  write_or_throw(sibling(opt.out, "_overlay.csv"), overlay.str());
  write_or_throw(sibling(opt.out, ".manifest.json"),
                 manifest("sweep", raw, t0).dump(2) + "\n");
  if (!opt.machine)
    std::cout << "wrote " << opt.out << " and " << sibling(opt.out, "_overlay.csv")
              << "\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw;
  const json spec = parse_spec(opt.spec_path, raw);
  SimConfig cfg{opt.samples, opt.seed, opt.antithetic};

  SimReport rep;
  if (spec.at("kind") == "bc") {
    const BcInputs in = load_bc(spec);
    BcChannel ch{get_vec(spec, "noise_powers")};
    check(validate(ch), "noise_powers");
    rep = simulate_bc(in.scheme, ch, in.src, cfg);
  } else {
    const MacInputs in = load_mac(spec);
    MacScheme scheme;
    if (spec.contains("eta"))
      scheme.eta = spec.at("eta").get<std::vector<int>>();
    else {
      const SignAssignment sa = sign_assignment(in.prob.sigma_t);
      scheme.eta = sa.feasible ? sa.scheme.eta : std::vector<int>(in.prob.l, 1);
    }
    rep = simulate_mac(in.prob, scheme, cfg);
  }

  const double z = rep.max_z();
  const bool pass = z < 4.0;
  const json man = manifest("simulate", raw, t0, json::array({opt.seed}));
  if (opt.machine) {
    json out = {{"verdict", pass ? "matched" : "not_matched"},
                {"conditions", {{"z_gate", pass}}},
                {"eigenvalues", json::array()},
                {"distortions", rep.empirical_d},
                {"gap", z},
                {"thresholds", nullptr},
                {"simulation",
                 {{"closed_form_d", rep.closed_d},
                  {"stderr_d", rep.stderr_d},
                  {"empirical_power", rep.empirical_power},
                  {"stderr_power", rep.stderr_power},
                  {"closed_power", rep.closed_power},
                  {"n_used", rep.n_used},
                  {"backend", rep.backend}}},
                {"manifest", man}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "samples: " << rep.n_used << "  backend: " << rep.backend << "\n";
    for (std::size_t i = 0; i < rep.empirical_d.size(); ++i)
      std::cout << "D[" << i + 1 << "]: empirical " << fmt(rep.empirical_d[i], 6)
                << "  closed " << fmt(rep.closed_d[i], 6) << "  stderr "
                << fmt(rep.stderr_d[i], 6) << "\n";
    for (std::size_t i = 0; i < rep.empirical_power.size(); ++i)
      std::cout << "power[" << i + 1 << "]: empirical "
                << fmt(rep.empirical_power[i], 6) << "  target "
                << fmt(rep.closed_power[i], 6) << "  stderr "
                << fmt(rep.stderr_power[i], 6) << "\n";
    std::cout << "max |z|: " << fmt(z, 6) << (pass ? " (pass)" : " (fail)") << "\n";
    std::cout << "manifest: " << man.dump() << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify source/channel matching for uncoded linear schemes"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* c) {
    c->add_option("spec", opt.spec_path, "JSON problem spec")->required();
    c->add_flag("--json", opt.machine, "machine-readable JSON output");
  };
  CLI::App* bc = app.add_subcommand("bc-certify", "certify a broadcast problem");
  add_common(bc);
  bc->add_option("--tol", opt.tol, "PSD pivot tolerance override");
  CLI::App* mac = app.add_subcommand("mac-certify", "certify a MAC/CEO problem");
  add_common(mac);
  CLI::App* sw = app.add_subcommand("sweep", "trace a matched region to CSV");
  add_common(sw);
  sw->add_option("--grid", opt.grid, "grid size WxH");
  sw->add_option("--x-range", opt.x_range, "x range a:b");
  sw->add_option("--y-range", opt.y_range, "y range a:b");
  sw->add_option("--out", opt.out, "region CSV path");
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo cross-check");
  add_common(sim);
  sim->add_option("--samples", opt.samples, "sample count");
  sim->add_option("--seed", opt.seed, "RNG seed");
  sim->add_flag("--antithetic", opt.antithetic, "variance-reduced sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (bc->parsed()) return cmd_bc_certify(opt);
    if (mac->parsed()) return cmd_mac_certify(opt);
    if (sw->parsed()) return cmd_sweep(opt);
    return cmd_simulate(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
