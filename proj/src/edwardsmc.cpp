#include "edwards/edwardsmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "edwards/besselsim.hpp"
#include "edwards/errors.hpp"
#include "edwards/rng.hpp"
#include "edwards/spectral.hpp"
#include "edwards/sturm.hpp"

namespace edwards::polymer {
namespace {

constexpr double kAutoDriftScale = 1.1;
constexpr std::size_t kBatches = 20;
enum Tag : std::uint64_t { kPath = 11, kComposite = 12, kTilt = 13, kCompositeSwap = 14 };

std::uint64_t stream_id(std::uint64_t tag, std::size_t i) { return (tag << 40) ^ i; }

// log cosh without overflow
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// Occupation counts on a growable window of bin indices.
class Occupation {
 public:
  explicit Occupation(long reserve) : offset_(reserve), steps_(static_cast<std::size_t>(2 * reserve + 1), 0) {}
  void add(long k) {
    long j = k + offset_;
    if (j < 0 || j >= static_cast<long>(steps_.size())) {
      grow(k);
      j = k + offset_;
    }
    ++steps_[static_cast<std::size_t>(j)];
  }
  // sum over bins of (count dt)^2 / bin
  double intersection(double dt, double bin) const {
    double s = 0.0;
    for (std::uint32_t c : steps_) s += static_cast<double>(c) * static_cast<double>(c);
    return s * dt * dt / bin;
  }
  long lo() const { return -offset_; }
  long hi() const { return static_cast<long>(steps_.size()) - offset_ - 1; }
  double count(long k) const {
    const long j = k + offset_;
    return j < 0 || j >= static_cast<long>(steps_.size()) ? 0.0 : static_cast<double>(steps_[static_cast<std::size_t>(j)]);
  }
  void clear() { std::fill(steps_.begin(), steps_.end(), 0); }

 private:
  void grow(long k) {
    const long need = std::max(std::abs(k) + 16, 2 * offset_);
    std::vector<std::uint32_t> next(static_cast<std::size_t>(2 * need + 1), 0);
    for (std::size_t j = 0; j < steps_.size(); ++j) next[j + static_cast<std::size_t>(need - offset_)] = steps_[j];
    steps_.swap(next);
    offset_ = need;
  }
  long offset_;
  std::vector<std::uint32_t> steps_;
};

long bin_index(double x, double bin) { return static_cast<long>(std::floor(x / bin)); }

struct PathOut {
  double endpoint = 0.0, H = 0.0, log_lr = 0.0;
};

// One proposal path: Brownian increments with drift sign*b. When keep is
// non-null the occupation counts are left there for the caller.
PathOut run_path(const PolymerConfig& cfg, double b, std::size_t i, Occupation& occ) {
  rng::Stream s(cfg.seed, stream_id(kPath, i));
  const std::size_t n = cfg.steps();
  const double sdt = std::sqrt(cfg.dt);
  double sign = 1.0;
  if (b > 0.0) sign = s.uniform() < 0.5 ? -1.0 : 1.0;
  const double step_drift = sign * b * cfg.dt;
  occ.clear();
  double x = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = x + step_drift + sdt * s.normal();
    occ.add(bin_index(0.5 * (x + next), cfg.bin));
    x = next;
  }
  PathOut p;
  p.endpoint = x;
  p.H = occ.intersection(cfg.dt, cfg.bin);
  p.log_lr = b > 0.0 ? 0.5 * b * b * cfg.T - log_cosh(b * x) : 0.0;
  return p;
}

std::vector<double> shifted_weights(std::span<const double> logw, double& shift) {
  shift = -std::numeric_limits<double>::infinity();
  for (double v : logw) shift = std::max(shift, v);
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i] - shift);
  return w;
}

void check_ess(double ess, std::size_t n, const char* where) {
  if (ess < 1e-3 * static_cast<double>(n)) {
    std::ostringstream os;
    os << where << ": effective sample size " << ess << " below 0.1% of " << n
       << " paths; use a smaller T or an importance drift";
    throw DegeneracyError(os.str());
  }
}

// Weighted moments of f over [b0, b1).
struct Moments {
  double mean = 0.0, var = 0.0, skew = 0.0;
};
Moments weighted_moments(std::span<const double> w, std::span<const double> f, std::size_t b0, std::size_t b1) {
  double sw = 0.0, sf = 0.0;
  for (std::size_t i = b0; i < b1; ++i) {
    sw += w[i];
    sf += w[i] * f[i];
  }
  Moments m;
  if (!(sw > 0.0)) return m;
  m.mean = sf / sw;
  double m2 = 0.0, m3 = 0.0;
  for (std::size_t i = b0; i < b1; ++i) {
    const double d = f[i] - m.mean;
    m2 += w[i] * d * d;
    m3 += w[i] * d * d * d;
  }
  m.var = m2 / sw;
  m.skew = m.var > 0.0 ? (m3 / sw) / std::pow(m.var, 1.5) : 0.0;
  return m;
}

// Standard error of a weighted statistic from batch replicates.
template <class Stat>
double batch_se(std::size_t n, Stat&& stat) {
  if (n < 2 * kBatches) return 0.0;
  std::vector<double> b(kBatches);
  for (std::size_t k = 0; k < kBatches; ++k) b[k] = stat(k * n / kBatches, (k + 1) * n / kBatches);
  return mc::summarize(b, 0).se;
}

}  // namespace

void PolymerConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("PolymerConfig: T must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("PolymerConfig: beta must be non-negative");
  if (!(dt > 0.0) || !(bin > 0.0)) throw DomainError("PolymerConfig: dt and bin must be positive");
  if (dt > bin * bin * (1.0 + 1e-12)) throw DomainError("PolymerConfig: need dt <= bin^2");
  const double r = T / dt;
  if (std::abs(r - std::round(r)) > 1e-9 * r) throw DomainError("PolymerConfig: T/dt must be an integer");
  if (n_paths < 2) throw DomainError("PolymerConfig: n_paths must be >= 2");
  if (!std::isfinite(drift)) throw DomainError("PolymerConfig: drift must be finite");
}

double PolymerConfig::effective_drift() const { return drift < 0.0 ? kAutoDriftScale * std::cbrt(beta) : drift; }

std::size_t PolymerConfig::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

double LocalTimeHistogram::total() const {
  double s = 0.0;
  for (const auto& [k, v] : bins) s += v;
  return s;
}

double LocalTimeHistogram::intersection() const {
  double s = 0.0;
  for (const auto& [k, v] : bins) s += v * v / bin;
  return s;
}

LocalTimeHistogram local_times(std::span<const double> path, double dt, double bin) {
  if (!(dt > 0.0) || !(bin > 0.0)) throw DomainError("local_times: dt and bin must be positive");
  LocalTimeHistogram h;
  h.bin = bin;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) h.bins[bin_index(0.5 * (path[k] + path[k + 1]), bin)] += dt;
  return h;
}

PolymerPaths sample_paths(const PolymerConfig& cfg) {
  cfg.validate();
  const double b = cfg.effective_drift();
  PolymerPaths out;
  out.endpoint.resize(cfg.n_paths);
  out.H.resize(cfg.n_paths);
  out.log_lr.resize(cfg.n_paths);
  out.log_weight.resize(cfg.n_paths);
  const long reserve = static_cast<long>((b * cfg.T + 8.0 * std::sqrt(cfg.T)) / cfg.bin) + 8;
  mc::for_paths(cfg.n_paths, cfg.parallel, [&](std::size_t i) {
    thread_local Occupation occ(0);
    if (occ.hi() < reserve) occ = Occupation(reserve);
    const PathOut p = run_path(cfg, b, i, occ);
    out.endpoint[i] = p.endpoint;
    out.H[i] = p.H;
    out.log_lr[i] = p.log_lr;
    out.log_weight[i] = -cfg.beta * p.H + p.log_lr;
  });
  return out;
}

PolymerEstimate sample_polymer(const PolymerConfig& cfg) {
  const PolymerPaths paths = sample_paths(cfg);
  const std::size_t n = cfg.n_paths;
  double shift = 0.0;
  const std::vector<double> w = shifted_weights(paths.log_weight, shift);

  PolymerEstimate e;
  e.n = n;
  e.seed = cfg.seed;
  e.ess = mc::effective_sample_size(w);
  const mc::McEstimate mw = mc::summarize(w, cfg.seed);
  if (cfg.beta == 0.0 && cfg.effective_drift() == 0.0) {
    e.logZ = 0.0;  // every weight is exactly 1
  } else {
    e.logZ = shift + std::log(mw.mean);
    e.logZ_se = mw.se / mw.mean;
  }
  e.rate_at_T = -e.logZ / cfg.T;
  e.rate_se = e.logZ_se / cfg.T;

  std::vector<double> wiener_H(n);
  for (std::size_t i = 0; i < n; ++i) wiener_H[i] = paths.H[i] * std::exp(paths.log_lr[i]);
  const mc::McEstimate mh = mc::summarize(wiener_H, cfg.seed);
  e.mean_H = mh.mean;
  e.mean_H_se = mh.se;

  check_ess(e.ess, n, "sample_polymer");
  std::vector<double> absB(n), sB(n);
  for (std::size_t i = 0; i < n; ++i) {
    absB[i] = std::abs(paths.endpoint[i]) / cfg.T;
    sB[i] = paths.endpoint[i] / cfg.T;
  }
  const mc::McEstimate em = mc::weighted_mean(w, absB, cfg.seed);
  e.endpoint_mean = em.mean;
  e.endpoint_mean_se = em.se;
  const mc::McEstimate es = mc::weighted_mean(w, sB, cfg.seed);
  e.signed_mean = es.mean;
  e.signed_mean_se = es.se;

  const double scale = cfg.T / std::sqrt(cfg.T);  // |B_T|/T -> |B_T|/sqrt(T)
  auto sd_stat = [&](std::size_t b0, std::size_t b1) {
    return std::sqrt(weighted_moments(w, absB, b0, b1).var) * scale;
  };
  e.endpoint_sd = sd_stat(0, n);
  e.endpoint_sd_se = batch_se(n, sd_stat);
  auto skew_stat = [&](std::size_t b0, std::size_t b1) { return weighted_moments(w, sB, b0, b1).skew; };
  e.skewness = skew_stat(0, n);
  e.skewness_se = batch_se(n, skew_stat);
  return e;
}

McEstimate tilted_mgf(double mu, const PolymerConfig& cfg) {
  if (!std::isfinite(mu)) throw DomainError("tilted_mgf: mu must be finite");
  const PolymerPaths paths = sample_paths(cfg);
  const std::size_t n = cfg.n_paths;
  std::vector<double> lv(n);
  for (std::size_t i = 0; i < n; ++i)
    lv[i] = paths.endpoint[i] >= 0.0 ? paths.log_weight[i] + mu * paths.endpoint[i]
                                     : -std::numeric_limits<double>::infinity();
  double shift = 0.0;
  const std::vector<double> v = shifted_weights(lv, shift);
  if (!std::isfinite(shift)) throw DegeneracyError("tilted_mgf: no path ended at B_T >= 0");
  const double ess = mc::effective_sample_size(v);
  check_ess(ess, n, "tilted_mgf");
  const mc::McEstimate m = mc::summarize(v, cfg.seed);
  McEstimate e;
  e.mean = (shift + std::log(m.mean)) / cfg.T;
  e.se = m.se / m.mean / cfg.T;
  e.n = static_cast<std::size_t>(ess);
  e.seed = cfg.seed;
  return e;
}

CollapseReport scaling_collapse(std::span<const double> betas, const PolymerConfig& cfg) {
  cfg.validate();
  if (betas.empty()) throw DomainError("scaling_collapse: need at least one beta");
  for (double b : betas)
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("scaling_collapse: betas must be positive");

  PolymerConfig ref = cfg;
  ref.beta = 1.0;
  ref.drift = cfg.drift < 0.0 ? -1.0 : cfg.drift;
  const PolymerEstimate r = sample_polymer(ref);

  CollapseReport rep;
  rep.reference_T = cfg.T;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    const double beta = betas[k];
    CollapseRow row;
    row.beta = beta;
    const double s23 = std::pow(beta, -2.0 / 3.0), s13 = std::cbrt(beta);
    row.T = cfg.T * s23;
    PolymerEstimate e = r;
    if (beta != 1.0) {
      PolymerConfig c = cfg;
      c.beta = beta;
      c.T = row.T;
      c.dt = cfg.dt * s23;
      c.bin = cfg.bin / s13;
      c.drift = cfg.drift < 0.0 ? -1.0 : cfg.drift * s13;
      c.seed = cfg.seed + 0x9E3779B97F4A7C15ULL * (k + 1);
      e = sample_polymer(c);
    }
    row.logZ = e.logZ;
    row.logZ_se = e.logZ_se;
    row.endpoint = e.endpoint_mean / s13;
    row.endpoint_se = e.endpoint_mean_se / s13;
    if (beta != 1.0) {
      row.z_logZ = (row.logZ - r.logZ) / std::hypot(row.logZ_se, r.logZ_se);
      row.z_endpoint = (row.endpoint - r.endpoint_mean) / std::hypot(row.endpoint_se, r.endpoint_mean_se);
    }
    rep.max_abs_z = std::max({rep.max_abs_z, std::abs(row.z_logZ), std::abs(row.z_endpoint)});
    lx.push_back(std::log(beta));
    ly.push_back(std::log(-row.logZ / row.T));
    rep.rows.push_back(row);
  }
  rep.exponent = std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx > 0.0) rep.exponent = sxy / sxx;
  return rep;
}

InverseTFit extrapolate_inverse_T(std::span<const double> Ts, std::span<const double> values,
                                  std::span<const double> ses) {
  if (Ts.size() < 2 || Ts.size() != values.size() || ses.size() != values.size())
    throw DomainError("extrapolate_inverse_T: need matching inputs of length >= 2");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t k = 0; k < Ts.size(); ++k) {
    const double w = ses[k] > 0.0 ? 1.0 / (ses[k] * ses[k]) : 1.0;
    const double x = 1.0 / Ts[k];
    S += w;
    Sx += w * x;
    Sy += w * values[k];
    Sxx += w * x * x;
    Sxy += w * x * values[k];
  }
  const double det = S * Sxx - Sx * Sx;
  if (!(det > 0.0)) throw DomainError("extrapolate_inverse_T: need two distinct horizons");
  InverseTFit f;
  f.c1 = (S * Sxy - Sx * Sy) / det;
  f.c0 = (Sy - f.c1 * Sx) / S;
  f.c0_se = std::sqrt(Sxx / det);
  return f;
}

namespace {

// W(h, tau) = int_0^tau w(h, t) dt = y_0(h) - v(h, tau), v the Dirichlet
// evolution of y_0 under 2 v'' - h v; columns at tau = m * dtau.
struct WTable {
  double h_max = 10.0;
  double dh = 0.0;
  double dtau = 0.0;
  std::vector<std::vector<double>> col;

  WTable(double T, std::size_t columns, std::size_t intervals) {
    dtau = T / static_cast<double>(columns - 1);
    const spectral::GridFunction g0 = spectral::uniform_grid(h_max, intervals);
    dh = h_max / static_cast<double>(intervals);
    std::vector<double> y0(g0.h.size());
    for (std::size_t i = 0; i < y0.size(); ++i) y0[i] = spectral::y_kernel(0.0, g0.h[i]);
    spectral::GridFunction init{g0.h, y0};
    init.u.back() = 0.0;
    col.resize(columns);
    col[0].assign(y0.size(), 0.0);
    col[0][0] = 1.0;
    for (std::size_t m = 1; m < columns; ++m) {
      const double tau = dtau * static_cast<double>(m);
      const auto steps = static_cast<std::size_t>(std::max(16.0, std::ceil(tau / 0.004)));
      const spectral::GridFunction v = spectral::heat_evolve(init, tau, steps);
      col[m].resize(y0.size());
      for (std::size_t i = 0; i < y0.size(); ++i) col[m][i] = y0[i] - v.u[i];
      col[m][0] = 1.0;
    }
  }
  double operator()(double h, std::size_t m) const {
    if (h >= h_max) return 0.0;
    const double p = h / dh;
    const auto i = static_cast<std::size_t>(p);
    const double f = p - static_cast<double>(i);
    return (1.0 - f) * col[m][i] + f * col[m][i + 1];
  }
};

// Conditioning data of one direct path, reflected to B_T >= 0.
struct EndpointData {
  double y = 0.0, h1 = 0.0, h2 = 0.0, t1 = 0.0, t2 = 0.0, mid = 0.0;
};

EndpointData endpoint_data(const Occupation& occ, double endpoint, double dt, double bin, double T) {
  const double sign = endpoint < 0.0 ? -1.0 : 1.0;
  // occupation density at bin k after reflection
  auto dens = [&](long k) { return occ.count(sign > 0 ? k : -k - 1) * dt / bin; };
  // linear interpolation between bin centres
  auto L = [&](double x) {
    const double p = x / bin - 0.5;
    const long k = static_cast<long>(std::floor(p));
    const double f = p - static_cast<double>(k);
    return (1.0 - f) * dens(k) + f * dens(k + 1);
  };
  EndpointData d;
  d.y = std::abs(endpoint);
  d.h1 = L(d.y);
  d.h2 = L(0.0);
  const long lo = std::min(occ.lo(), -occ.hi() - 1), hi = std::max(occ.hi(), -occ.lo() - 1);
  const long ky = bin_index(d.y, bin);
  for (long k = lo; k <= hi; ++k) {
    const double m = dens(k) * bin;
    if (k < 0) d.t2 += m;
    if (k > ky) d.t1 += m;
    if (k == ky) d.t1 += m * (static_cast<double>(k + 1) - d.y / bin);
  }
  d.mid = T - d.t1 - d.t2;
  return d;
}

struct Piece {
  double A = 0.0, Q = 0.0, end = 0.0;
};

Piece besq0_piece(double h, double dx, std::size_t cap, rng::Stream& s) {
  Piece p;
  double x = h;
  for (std::size_t n = 0; n < cap && x > 0.0; ++n) {
    const double next = besq::besq0_step(x, dx, s);
    p.A += 0.5 * (x + next) * dx;
    p.Q += 0.5 * (x * x + next * next) * dx;
    x = next;
  }
  return p;
}

Piece besq2_piece(double h, double length, double dx, rng::Stream& s) {
  Piece p;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(length / dx - 1e-9)));
  const double step = length / static_cast<double>(n);
  double x = h;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = besq::besq2_step(x, step, s.normal());
    p.A += 0.5 * (x + next) * step;
    p.Q += 0.5 * (x * x + next * next) * step;
    x = next;
  }
  p.end = x;
  return p;
}

}  // namespace

RayKnightReport rayknight_consistency(double a, const PolymerConfig& cfg, double window_rel) {
  cfg.validate();
  if (!(a < spectral::a_dstar())) throw DomainError("rayknight_consistency: requires a < a**");
  if (!(window_rel > 0.0)) throw DomainError("rayknight_consistency: window must be positive");
  constexpr std::size_t kMaxTries = 2000;
  const double T = cfg.T;
  const double dx = cfg.bin;
  const std::size_t cap = static_cast<std::size_t>(std::ceil(50.0 * T / dx)) + 100;
  const auto eig = sturm::principal_eigen(a);

  PolymerConfig direct = cfg;
  direct.drift = 0.0;
  const std::size_t n = cfg.n_paths;
  std::vector<double> H(n), C(n), Cswap(n), lhs(n);
  std::vector<unsigned char> ok(n, 0);
  std::vector<std::size_t> tries(n, 0), accepts(n, 0);
  const long reserve = static_cast<long>(8.0 * std::sqrt(T) / cfg.bin) + 8;
  auto win_area = [&](double t) { return window_rel * std::max(t, 0.1 * T); };
  auto win_h = [&](double h) { return window_rel * std::max(h, 0.25 * std::sqrt(T)); };

  mc::for_paths(n, cfg.parallel, [&](std::size_t i) {
    Occupation occ(reserve);
    const PathOut p = run_path(direct, 0.0, i, occ);
    H[i] = p.H;
    lhs[i] = p.endpoint >= 0.0 ? std::exp(a * T - p.H - eig.rho * p.endpoint) : 0.0;
    const EndpointData d = endpoint_data(occ, p.endpoint, cfg.dt, cfg.bin, T);
    // swapped: the two BESQ0 pieces are drawn in the opposite order from an independent stream
    auto draw = [&](bool swapped, std::size_t& tried, std::size_t& accepted, double& out) {
      rng::Stream s(cfg.seed, stream_id(swapped ? kCompositeSwap : kComposite, i));
      Piece pc[3];
      bool got[3] = {false, false, false};
      auto outer = [&](int k, double h0, double area) {
        for (std::size_t t = 0; t < kMaxTries && !got[k]; ++t) {
          ++tried;
          pc[k] = besq0_piece(h0, dx, cap, s);
          got[k] = std::abs(pc[k].A - area) <= win_area(area);
        }
      };
      const int first = swapped ? 2 : 0, last = swapped ? 0 : 2;
      outer(first, first == 0 ? d.h1 : d.h2, first == 0 ? d.t1 : d.t2);
      for (std::size_t t = 0; t < kMaxTries && !got[1] && got[first]; ++t) {
        ++tried;
        pc[1] = d.y > 0.0 ? besq2_piece(d.h1, d.y, dx, s) : Piece{0.0, 0.0, d.h1};
        got[1] = std::abs(pc[1].A - d.mid) <= win_area(d.mid) && std::abs(pc[1].end - d.h2) <= win_h(d.h2);
      }
      if (got[1]) outer(last, last == 0 ? d.h1 : d.h2, last == 0 ? d.t1 : d.t2);
      accepted += static_cast<std::size_t>(got[0]) + got[1] + got[2];
      out = pc[0].Q + pc[1].Q + pc[2].Q;
      return got[0] && got[1] && got[2];
    };
    std::size_t swap_tries = 0, swap_acc = 0;
    const bool main_ok = draw(false, tries[i], accepts[i], C[i]);
    const bool swap_ok = main_ok && draw(true, swap_tries, swap_acc, Cswap[i]);
    ok[i] = main_ok && swap_ok ? 1 : 0;
  });

  RayKnightReport rep;
  rep.a = a;
  const double total_tries = static_cast<double>(std::accumulate(tries.begin(), tries.end(), std::size_t{0}));
  const double total_acc = static_cast<double>(std::accumulate(accepts.begin(), accepts.end(), std::size_t{0}));
  rep.acceptance = total_tries > 0.0 ? total_acc / total_tries : 0.0;
  if (rep.acceptance < 1e-4) {
    std::ostringstream os;
    os << "rayknight_consistency: acceptance " << rep.acceptance << " below 1e-4; widen the windows";
    throw DegeneracyError(os.str());
  }
  std::vector<double> h, c, cs;
  for (std::size_t i = 0; i < n; ++i)
    if (ok[i]) {
      h.push_back(H[i]);
      c.push_back(C[i]);
      cs.push_back(Cswap[i]);
    }
  rep.matched = h.size();
  if (rep.matched < 2) throw DegeneracyError("rayknight_consistency: fewer than two matched paths");
  auto var_est = [&](const std::vector<double>& v, double m) {
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
    return mc::summarize(d, cfg.seed);
  };
  const auto mh = mc::summarize(h, cfg.seed), mcmp = mc::summarize(c, cfg.seed), msw = mc::summarize(cs, cfg.seed);
  const auto vh = var_est(h, mh.mean), vc = var_est(c, mcmp.mean), vs = var_est(cs, msw.mean);
  rep.direct_mean = mh.mean;
  rep.direct_mean_se = mh.se;
  rep.composite_mean = mcmp.mean;
  rep.composite_mean_se = mcmp.se;
  rep.z_mean = (mh.mean - mcmp.mean) / std::hypot(mh.se, mcmp.se);
  rep.direct_var = vh.mean;
  rep.direct_var_se = vh.se;
  rep.composite_var = vc.mean;
  rep.composite_var_se = vc.se;
  rep.z_var = (vh.mean - vc.mean) / std::hypot(vh.se, vc.se);
  rep.swap_z = std::max(std::abs(msw.mean - mcmp.mean) / std::hypot(msw.se, mcmp.se),
                        std::abs(vs.mean - vc.mean) / std::hypot(vs.se, vc.se));

  const auto ml = mc::summarize(lhs, cfg.seed);
  rep.lhs = ml.mean;
  rep.lhs_se = ml.se;

  // right side: tilted BESQ2 in the space variable, read out at A = s
  constexpr std::size_t kU = 60;
  const WTable W(T, 2 * kU + 1, 500);
  const double du = T / static_cast<double>(kU);
  const double dy = std::min(0.01, dx);
  const std::size_t tilt_cap = static_cast<std::size_t>(std::ceil(40.0 * T / dy));
  std::vector<double> rhs(n, 0.0);
  mc::for_paths(n, cfg.parallel, [&](std::size_t i) {
    rng::Stream s(cfg.seed, stream_id(kTilt, i));
    const double x0 = besq::sample_equilibrium(eig, s.uniform());
    // Y at s_j = T - (j + 1/2) du, j = 0..kU-1, i.e. at increasing A
    std::vector<double> Y(kU, 0.0);
    double x = x0, A = 0.0, integral = 0.0;
    double v_prev = a * x - x * x - eig.rho;
    std::size_t next_j = kU;  // fill Y from the smallest s upward
    auto s_of = [&](std::size_t j) { return T - (static_cast<double>(j) + 0.5) * du; };
    std::size_t steps = 0;
    while (next_j > 0 && steps < tilt_cap) {
      const double nx = besq::besq2_step(x, dy, s.normal());
      const double dA = 0.5 * (x + nx) * dy;
      while (next_j > 0 && A + dA >= s_of(next_j - 1)) {
        const double f = dA > 0.0 ? (s_of(next_j - 1) - A) / dA : 0.0;
        Y[next_j - 1] = x + f * (nx - x);
        --next_j;
      }
      A += dA;
      const double v = a * nx - nx * nx - eig.rho;
      integral += 0.5 * (v_prev + v) * dy;
      v_prev = v;
      x = nx;
      ++steps;
    }
    if (next_j > 0) {
      rhs[i] = 0.0;  // horizon not reached; counts as a zero-weight path
      return;
    }
    const double logD = eig.log_eval(x) - eig.log_eval(x0) + integral;
    const double inv_x0 = std::exp(-eig.log_eval(x0));
    // dW1_i = W(x0, (i+1) du) - W(x0, i du), columns at multiples of du/2
    std::vector<double> dW1(kU);
    for (std::size_t k = 0; k < kU; ++k) dW1[k] = W(x0, 2 * (k + 1)) - W(x0, 2 * k);
    double acc = 0.0;
    std::vector<double> G(kU + 1);
    for (std::size_t j = 0; j < kU; ++j) {
      // u-bin [j du, (j+1) du], Y frozen at s = T - (j + 1/2) du; the endpoint
      // density in y becomes one in s through dy/ds = 1/Y_s
      const double y = Y[j];
      for (std::size_t m = 0; m <= j; ++m) G[m] = W(y, 2 * m + 1);  // W(y, (m + 1/2) du)
      double bin = 0.0;
      for (std::size_t k = 0; k <= j; ++k) {
        const std::size_t m = j - k;
        bin += dW1[k] * (G[m] - (m > 0 ? G[m - 1] : 0.0));
      }
      acc += std::exp(a * (static_cast<double>(j) + 0.5) * du - eig.log_eval(y)) * bin / y;
    }
    rhs[i] = std::exp(logD) * inv_x0 * acc;
  });
  const auto mr = mc::summarize(rhs, cfg.seed);
  rep.rhs = mr.mean;
  rep.rhs_se = mr.se;
  rep.z_bookkeeping = (rep.lhs - rep.rhs) / std::hypot(rep.lhs_se, rep.rhs_se);
  return rep;
}

}  // namespace edwards::polymer
