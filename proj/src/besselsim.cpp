#include "edwards/besselsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edwards/errors.hpp"
#include "edwards/rng.hpp"
#include "edwards/spectral.hpp"

namespace edwards::besq {
namespace {

// Paths whose log-weight falls below this contribute nothing measurable.
constexpr double kLogWeightFloor = -40.0;
constexpr double kHorizonFraction = 0.01;

// Stream ids: the path index in the low bits, a per-purpose tag above, so
// different estimators with the same seed do not share randomness.
std::uint64_t stream_id(std::uint64_t tag, std::size_t path) { return (tag << 40) ^ path; }

enum Tag : std::uint64_t { kBesq = 1, kY = 2, kW = 3, kTilt = 4, kPassage = 5, kExact = 6 };

// Hybrid BESQ^0 step. Below kExactRatio * h: the exact transition,
// Poisson(x / 2h) then Gamma(N, 2h). Above: the quadratic branch of the
// QE scheme, a (b + Z)^2 with the exact conditional mean x and variance 4xh
// (psi = 4h/x <= 0.1 there). Gaussian Euler increments in the 10h-1000h
// range bias the absorption law by several standard errors at n = 4e5.
constexpr double kExactRatio = 40.0;

double exact_besq0_step(double x, double h, rng::Stream& s) {
  const std::uint64_t k = s.poisson(x / (2.0 * h));
  return k == 0 ? 0.0 : 2.0 * h * s.gamma(static_cast<double>(k));
}

double qe_besq0_step(double x, double h, double z) {
  const double two_over_psi = x / (2.0 * h);
  const double b2 = two_over_psi - 1.0 + std::sqrt(two_over_psi * (two_over_psi - 1.0));
  const double a = x / (1.0 + b2);
  const double y = std::sqrt(b2) + z;
  return a * y * y;
}

[[noreturn]] void non_finite(const char* where, std::size_t step) {
  std::ostringstream os;
  os << where << ": non-finite state at step " << step;
  throw NumericError(os.str());
}

// BESQ^0 run to absorption on `levels` coupled grids. Level k uses the
// sum of 2^(levels-1-k) consecutive finest increments.
struct LevelState {
  double x = 0.0, A = 0.0, Q = 0.0;
  bool done = false;
  bool resolved = false;
};

void run_absorbed(double a, double h0, double dt_fine, int levels, std::size_t max_fine_steps, rng::Stream& s,
                  std::vector<rng::Stream>* exact, std::vector<LevelState>& st) {
  st.assign(static_cast<std::size_t>(levels), LevelState{h0, 0.0, 0.0, h0 <= 0.0, h0 <= 0.0});
  std::vector<double> pending(st.size(), 0.0);
  std::size_t remaining = h0 <= 0.0 ? 0 : st.size();
  for (std::size_t n = 1; n <= max_fine_steps && remaining > 0; ++n) {
    const double dw = std::sqrt(dt_fine) * s.normal();
    for (std::size_t k = 0; k < st.size(); ++k) {
      pending[k] += dw;
      const std::size_t stride = std::size_t{1} << (st.size() - 1 - k);
      if (n % stride != 0) continue;
      LevelState& l = st[k];
      const double w = pending[k];
      pending[k] = 0.0;
      if (l.done) continue;
      const double h = dt_fine * static_cast<double>(stride);
      const double xn = l.x;
      if (exact && xn < kExactRatio * h) {
        const double next = exact_besq0_step(xn, h, (*exact)[k]);
        l.A += 0.5 * (xn + next) * h;
        l.Q += 0.5 * (xn * xn + next * next) * h;
        l.x = next;
        if (next == 0.0 || a * l.A - l.Q < kLogWeightFloor) {
          l.done = l.resolved = true;
          --remaining;
        }
        continue;
      }
      const double next = exact ? qe_besq0_step(xn, h, w / std::sqrt(h)) : xn + 2.0 * std::sqrt(std::max(xn, 0.0)) * w;
      if (!std::isfinite(next)) non_finite("estimate_y", n);
      if (next <= 0.0) {
        const double tau = h * xn / (xn - next);
        l.A += 0.5 * xn * tau;
        l.Q += xn * xn * tau / 3.0;
        l.x = 0.0;
        l.done = l.resolved = true;
        --remaining;
        continue;
      }
      l.A += 0.5 * (xn + next) * h;
      l.Q += 0.5 * (xn * xn + next * next) * h;
      l.x = next;
      if (a * l.A - l.Q < kLogWeightFloor) {
        l.done = l.resolved = true;
        --remaining;
      }
    }
  }
}

void check_horizon(std::size_t unresolved, std::size_t n, const char* where) {
  if (static_cast<double>(unresolved) > kHorizonFraction * static_cast<double>(n)) {
    std::ostringstream os;
    os << where << ": " << unresolved << " of " << n
       << " paths neither absorbed nor negligible at the step cap; raise max_steps or dt";
    throw HorizonError(os.str());
  }
}

McEstimate paired_diff(const std::vector<double>& u, const std::vector<double>& v, std::uint64_t seed) {
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
  return mc::summarize(d, seed);
}

}  // namespace

double besq0_step(double x, double h, rng::Stream& s) {
  if (x < kExactRatio * h) return exact_besq0_step(x, h, s);
  return qe_besq0_step(x, h, s.normal());
}

std::string to_string(Scheme s) { return s == Scheme::euler_abs ? "euler_abs" : "exact_besq0"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "euler_abs") return Scheme::euler_abs;
  if (s == "exact_besq0") return Scheme::exact_besq0;
  throw DomainError("unknown scheme '" + s + "' (expected euler_abs or exact_besq0)");
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be positive");
  if (n_paths < 1) throw DomainError("SimConfig: n_paths must be >= 1");
  if (max_steps < 1) throw DomainError("SimConfig: max_steps must be >= 1");
}

std::vector<PathFunctionalSample> simulate_besq(int dim, double h0, double t_end, const SimConfig& cfg) {
  cfg.validate();
  if (dim != 0 && dim != 2) throw DomainError("simulate_besq: dim must be 0 or 2");
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw DomainError("simulate_besq: h0 must be non-negative");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("simulate_besq: t_end must be positive");
  if (cfg.scheme == Scheme::exact_besq0 && dim != 0)
    throw DomainError("simulate_besq: exact transition sampling is offered for dim 0 only");

  std::vector<PathFunctionalSample> out(cfg.n_paths);
  if (cfg.scheme == Scheme::exact_besq0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
      rng::Stream s(cfg.seed, stream_id(kBesq, i));
      PathFunctionalSample p{0.0, nan, nan, nan};
      const std::uint64_t k = h0 > 0.0 ? s.poisson(h0 / (2.0 * t_end)) : 0;
      if (k > 0) {
        p.terminal = 2.0 * t_end * s.gamma(static_cast<double>(k));
        p.absorbed_at = std::numeric_limits<double>::infinity();
      }
      out[i] = p;
    });
    return out;
  }

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / cfg.dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  const double sh = std::sqrt(h);
  const double drift = dim == 2 ? 2.0 * h : 0.0;
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kBesq, i));
    PathFunctionalSample p;
    double x = h0;
    if (dim == 0 && h0 == 0.0) {
      p.absorbed_at = 0.0;
      out[i] = p;
      return;
    }
    rng::Stream ex(cfg.seed, stream_id(kExact + 2, i));
    const bool hybrid = dim == 0 && cfg.hybrid_besq0;
    for (std::size_t n = 0; n < steps; ++n) {
      if (hybrid && x < kExactRatio * h) {
        const double next = exact_besq0_step(x, h, ex);
        p.additive += 0.5 * (x + next) * h;
        p.quad += 0.5 * (x * x + next * next) * h;
        x = next;
        if (next == 0.0) {
          p.absorbed_at = static_cast<double>(n + 1) * h;
          break;
        }
        continue;
      }
      double next = hybrid ? qe_besq0_step(x, h, s.normal())
                           : x + drift + 2.0 * std::sqrt(std::max(x, 0.0)) * sh * s.normal();
      if (!std::isfinite(next)) non_finite("simulate_besq", n + 1);
      if (dim == 0 && next <= 0.0) {
        const double tau = h * x / (x - next);
        p.additive += 0.5 * x * tau;
        p.quad += x * x * tau / 3.0;
        p.absorbed_at = static_cast<double>(n) * h + tau;
        x = 0.0;
        break;
      }
      if (next < 0.0) next = 0.0;
      p.additive += 0.5 * (x + next) * h;
      p.quad += 0.5 * (x * x + next * next) * h;
      x = next;
    }
    p.terminal = x;
    out[i] = p;
  });
  return out;
}

CoupledLevels estimate_y_levels(double a, double h0, const SimConfig& cfg, int levels) {
  cfg.validate();
  if (!std::isfinite(a)) throw DomainError("estimate_y: a must be finite");
  if (a >= spectral::a_dstar()) throw DomainError("estimate_y: requires a < a** (the mean is infinite otherwise)");
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw DomainError("estimate_y: h0 must be non-negative");
  if (levels < 1 || levels > 8) throw DomainError("estimate_y: levels must be in [1, 8]");

  const auto L = static_cast<std::size_t>(levels);
  const double dt_fine = cfg.dt / static_cast<double>(std::size_t{1} << (L - 1));
  const std::size_t max_fine = cfg.max_steps << (L - 1);
  std::vector<std::vector<double>> val(L, std::vector<double>(cfg.n_paths));
  std::vector<unsigned char> unresolved(cfg.n_paths, 0);
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kY, i));
    std::vector<rng::Stream> exact;
    for (std::size_t k = 0; k < L; ++k) exact.emplace_back(cfg.seed, stream_id(kExact + 8 * k, i));
    std::vector<LevelState> st;
    run_absorbed(a, h0, dt_fine, levels, max_fine, s, cfg.hybrid_besq0 ? &exact : nullptr, st);
    for (std::size_t k = 0; k < L; ++k) {
      val[k][i] = std::exp(a * st[k].A - st[k].Q);
      if (!st[k].resolved) unresolved[i] = 1;
    }
  });
  std::size_t bad = 0;
  for (unsigned char u : unresolved) bad += u;
  check_horizon(bad, cfg.n_paths, "estimate_y");

  CoupledLevels out;
  for (std::size_t k = 0; k < L; ++k) {
    out.dts.push_back(cfg.dt / static_cast<double>(std::size_t{1} << k));
    out.level.push_back(mc::summarize(val[k], cfg.seed));
  }
  for (std::size_t k = 0; k + 1 < L; ++k) out.diff.push_back(paired_diff(val[k], val[k + 1], cfg.seed));
  return out;
}

McEstimate estimate_y(double a, double h0, const SimConfig& cfg) {
  if (h0 == 0.0) {
    cfg.validate();
    return {1.0, 0.0, cfg.n_paths, cfg.seed};
  }
  return estimate_y_levels(a, h0, cfg, 1).level.front();
}

WHistogram estimate_w(double h0, std::span<const double> edges, const SimConfig& cfg) {
  cfg.validate();
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw DomainError("estimate_w: h0 must be non-negative");
  if (edges.size() < 2) throw DomainError("estimate_w: need at least two bin edges");
  for (std::size_t j = 0; j + 1 < edges.size(); ++j)
    if (!(edges[j] < edges[j + 1]) || edges[j] < 0.0) throw DomainError("estimate_w: edges must increase from >= 0");

  const std::size_t nb = edges.size() - 1;
  std::vector<double> weight(cfg.n_paths), area(cfg.n_paths);
  std::vector<unsigned char> unresolved(cfg.n_paths, 0);
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kW, i));
    std::vector<rng::Stream> exact{rng::Stream(cfg.seed, stream_id(kExact + 1, i))};
    std::vector<LevelState> st;
    run_absorbed(0.0, h0, cfg.dt, 1, cfg.max_steps, s, cfg.hybrid_besq0 ? &exact : nullptr, st);
    weight[i] = std::exp(-st[0].Q);
    area[i] = st[0].A;
    if (!st[0].resolved) unresolved[i] = 1;
  });
  std::size_t bad = 0;
  for (unsigned char u : unresolved) bad += u;
  check_horizon(bad, cfg.n_paths, "estimate_w");

  WHistogram out;
  out.edges.assign(edges.begin(), edges.end());
  out.mass = mc::summarize(weight, cfg.seed);
  std::vector<double> in_bins(cfg.n_paths, 0.0);
  std::vector<double> f(cfg.n_paths);
  for (std::size_t j = 0; j < nb; ++j) {
    const double width = edges[j + 1] - edges[j];
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      const bool in = area[i] >= edges[j] && area[i] < edges[j + 1];
      f[i] = in ? weight[i] / width : 0.0;
      if (in) in_bins[i] = weight[i];
    }
    out.density.push_back(mc::summarize(f, cfg.seed));
  }
  out.binned_mass = mc::summarize(in_bins, cfg.seed);
  return out;
}

std::vector<double> TiltedSample::weights() const {
  std::vector<double> w(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) w[i] = std::exp(paths[i].log_weight);
  return w;
}

namespace {

// Shared equilibrium-start table so each path does a binary search only.
struct EquilibriumTable {
  std::vector<double> cdf, grid;
  explicit EquilibriumTable(const sturm::EigenSolution& eig) : grid(eig.grid) {
    const std::size_t n = eig.grid.size() - 1;
    cdf.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = 0.5 * (eig.xvals[i] * eig.xvals[i] + eig.xvals[i + 1] * eig.xvals[i + 1]);
      cdf[i + 1] = cdf[i] + m * (eig.grid[i + 1] - eig.grid[i]);
    }
  }
  double draw(double u) const {
    const double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const auto n = static_cast<std::ptrdiff_t>(grid.size() - 1);
    const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, n) - 1);
    const double span = cdf[j + 1] - cdf[j];
    const double frac = span > 0.0 ? (target - cdf[j]) / span : 0.0;
    return grid[j] + frac * (grid[j + 1] - grid[j]);
  }
};

}  // namespace

double sample_equilibrium(const sturm::EigenSolution& eig, double u) { return EquilibriumTable(eig).draw(u); }

TiltedSample simulate_tilted(const sturm::EigenSolution& eig, double h0, double t_end, const SimConfig& cfg,
                             bool equilibrium) {
  cfg.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("simulate_tilted: t_end must be positive");
  if (!equilibrium && (!(h0 > 0.0) || !std::isfinite(h0)))
    throw DomainError("simulate_tilted: h0 must be positive (x_a is evaluated at the start)");

  const double a = eig.a, rho = eig.rho;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / cfg.dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  const double sh = std::sqrt(h);
  const EquilibriumTable table(eig);

  TiltedSample out;
  out.paths.resize(cfg.n_paths);
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kTilt, i));
    double x = equilibrium ? table.draw(s.uniform()) : h0;
    TiltedPath p;
    p.x0 = x;
    double integral = 0.0;
    double v_prev = a * x - x * x - rho;
    for (std::size_t n = 0; n < steps; ++n) {
      double next = x + 2.0 * h + 2.0 * std::sqrt(std::max(x, 0.0)) * sh * s.normal();
      if (!std::isfinite(next)) non_finite("simulate_tilted", n + 1);
      x = std::max(next, 0.0);
      const double v = a * x - x * x - rho;
      integral += 0.5 * (v_prev + v) * h;
      v_prev = v;
    }
    p.xt = x;
    p.log_weight = eig.log_eval(x) - eig.log_eval(p.x0) + integral;
    out.paths[i] = p;
  });
  out.ess = mc::effective_sample_size(out.weights());
  if (out.ess < 0.01 * static_cast<double>(cfg.n_paths)) {
    std::ostringstream os;
    os << "simulate_tilted: effective sample size " << out.ess << " below 1% of " << cfg.n_paths
       << " paths; shorten t_end";
    throw DegeneracyError(os.str());
  }
  return out;
}

McEstimate mixing_correlation(const sturm::EigenSolution& eig, double s, double lo, double hi,
                              const SimConfig& cfg) {
  const TiltedSample ts = simulate_tilted(eig, 0.0, s, cfg, true);
  const std::vector<double> w = ts.weights();
  constexpr std::size_t kBatches = 20;
  const std::size_t n = ts.paths.size();
  auto corr = [&](std::size_t b0, std::size_t b1) {
    double sw = 0, sf = 0, sg = 0;
    for (std::size_t i = b0; i < b1; ++i) {
      const double f = ts.paths[i].x0 >= lo && ts.paths[i].x0 <= hi ? 1.0 : 0.0;
      const double g = ts.paths[i].xt >= lo && ts.paths[i].xt <= hi ? 1.0 : 0.0;
      sw += w[i];
      sf += w[i] * f;
      sg += w[i] * g;
    }
    const double mf = sf / sw, mg = sg / sw;
    double cfg_ = 0, vf = 0, vg = 0;
    for (std::size_t i = b0; i < b1; ++i) {
      const double f = (ts.paths[i].x0 >= lo && ts.paths[i].x0 <= hi ? 1.0 : 0.0) - mf;
      const double g = (ts.paths[i].xt >= lo && ts.paths[i].xt <= hi ? 1.0 : 0.0) - mg;
      cfg_ += w[i] * f * g;
      vf += w[i] * f * f;
      vg += w[i] * g * g;
    }
    return vf > 0.0 && vg > 0.0 ? cfg_ / std::sqrt(vf * vg) : 0.0;
  };
  McEstimate e;
  e.seed = cfg.seed;
  e.n = static_cast<std::size_t>(ts.ess);
  e.mean = corr(0, n);
  if (n >= 2 * kBatches) {
    std::vector<double> b(kBatches);
    for (std::size_t k = 0; k < kBatches; ++k) b[k] = corr(k * n / kBatches, (k + 1) * n / kBatches);
    e.se = mc::summarize(b, cfg.seed).se;
  }
  return e;
}

double first_passage_density(double h, double t) {
  if (!(h > 0.0) || !(t > 0.0) || !std::isfinite(h) || !std::isfinite(t))
    throw DomainError("first_passage_density: h and t must be positive");
  return h * std::exp(-h * h / (8.0 * t)) / (std::sqrt(8.0 * std::numbers::pi) * t * std::sqrt(t));
}

double first_passage_probability(double h, double t_lo, double t_hi) {
  if (!(h > 0.0) || !(t_lo >= 0.0) || !(t_hi >= t_lo)) throw DomainError("first_passage_probability: bad arguments");
  auto cdf = [h](double t) { return t > 0.0 ? std::erfc(0.5 * h / std::sqrt(2.0 * t)) : 0.0; };
  return cdf(t_hi) - cdf(t_lo);
}

McEstimate first_passage_fraction(double h, double t_lo, double t_hi, const SimConfig& cfg) {
  cfg.validate();
  if (!(h > 0.0) || !(t_lo >= 0.0) || !(t_hi > t_lo)) throw DomainError("first_passage_fraction: bad arguments");
  const auto steps = static_cast<std::size_t>(std::ceil(t_hi / cfg.dt - 1e-9));
  const double dt = cfg.dt;
  const double sdt = std::sqrt(dt);
  std::vector<double> hit(cfg.n_paths);
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kPassage, i));
    double x = 0.5 * h;
    double when = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < steps; ++n) {
      const double next = x + sdt * s.normal();
      const bool crossed = next <= 0.0 || s.uniform() < std::exp(-2.0 * x * next / dt);
      if (crossed) {
        when = (static_cast<double>(n) + 0.5) * dt;
        break;
      }
      x = next;
    }
    hit[i] = when >= t_lo && when <= t_hi ? 1.0 : 0.0;
  });
  return mc::summarize(hit, cfg.seed);
}

std::vector<OracleCheck> validation_suite(const std::string& suite, const SimConfig& cfg) {
  std::vector<OracleCheck> out;
  auto add = [&](std::string name, const McEstimate& e, double target) {
    out.push_back({std::move(name), e.mean, target, e.se, e.z(target)});
  };
  if (suite == "absorption") {
    SimConfig c = cfg;
    c.scheme = Scheme::euler_abs;
    auto frac = [](const std::vector<PathFunctionalSample>& v, std::uint64_t seed) {
      std::vector<double> f(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i].terminal == 0.0 ? 1.0 : 0.0;
      return mc::summarize(f, seed);
    };
    add("besq0_absorbed_h1_t0.5_euler", frac(simulate_besq(0, 1.0, 0.5, c), c.seed), std::exp(-1.0));
    c.scheme = Scheme::exact_besq0;
    add("besq0_absorbed_h1_t0.5_exact", frac(simulate_besq(0, 1.0, 0.5, c), c.seed), std::exp(-1.0));
    c.scheme = Scheme::euler_abs;
    const auto p2 = simulate_besq(2, 1.0, 2.0, c);
    std::vector<double> term(p2.size());
    for (std::size_t i = 0; i < p2.size(); ++i) term[i] = p2[i].terminal;
    add("besq2_terminal_mean_h1_t2", mc::summarize(term, c.seed), 5.0);
    add("first_passage_h1_bin_0.2_0.3", first_passage_fraction(1.0, 0.2, 0.3, c),
        first_passage_probability(1.0, 0.2, 0.3));
  } else if (suite == "y") {
    add("y_a0_h1", estimate_y(0.0, 1.0, cfg), spectral::y_kernel(0.0, 1.0));
    add("y_a2_h0.5", estimate_y(2.0, 0.5, cfg), spectral::y_kernel(2.0, 0.5));
  } else if (suite == "w") {
    SimConfig c = cfg;
    c.n_paths = cfg.n_paths * 10;
    const std::vector<double> edges{0.0, 0.5, 1.0, 2.0, 2.9, 3.1, 5.0};
    const WHistogram hist = estimate_w(1.0, edges, c);
    const auto expn = spectral::w_coefficients(200);
    const double target =
        (spectral::w_cumulative(1.0, 3.1, expn) - spectral::w_cumulative(1.0, 2.9, expn)) / 0.2;
    add("w_h1_bin_2.9_3.1", hist.density[4], target);
    add("w_mass_h1", hist.mass, spectral::y_kernel(0.0, 1.0));
  } else if (suite == "tilted") {
    const auto eig = sturm::principal_eigen(2.0);
    const TiltedSample ts = simulate_tilted(eig, 1.0, 1.0, cfg, false);
    add("girsanov_mean_a2_t1_h1", mc::summarize(ts.weights(), cfg.seed), 1.0);
    const TiltedSample eq = simulate_tilted(eig, 0.0, 1.0, cfg, true);
    std::vector<double> xt(eq.paths.size());
    for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = eq.paths[i].xt;
    add("stationary_mean_a2_t1", mc::weighted_mean(eq.weights(), xt, cfg.seed), eig.rho1);
    add("mixing_corr_a2_s5", mixing_correlation(eig, 5.0, 0.0, 1.0, cfg), 0.0);
  } else {
    throw DomainError("unknown suite '" + suite + "' (expected absorption, y, w or tilted)");
  }
  return out;
}

}  // namespace edwards::besq
