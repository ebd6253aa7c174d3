#include "edwards/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "edwards/errors.hpp"
#include "edwards/tridiag.hpp"

namespace edwards::sturm {
namespace {

// Decay exponent at the truncation point: x_a(h_max) ~ exp(-kTailExponent).
// Large enough that 0.9 h_max sits deep in the h^{3/2} decay regime.
constexpr double kTailExponent = 100.0;
constexpr int kMaxExtraLevels = 5;
constexpr double kGridResidual = 5e-7;

double rho_guess(double a) {
  if (a <= 0.0) return -std::sqrt(2.0) * std::sqrt(-a);
  return 0.25 * a * a - std::sqrt(2.0) * std::sqrt(a);
}

// Local WKB decay rate of x_a beyond the turning point.
double wkb_rate(double a, double rho, double h) {
  const double v = h * h - a * h + rho;
  return v > 0.0 ? std::sqrt(v / (2.0 * h)) : 0.0;
}

double turning_point(double a, double rho) {
  // largest root of h^2 - a h + rho = 0, or 0 when none is positive
  const double disc = a * a - 4.0 * rho;
  if (disc < 0.0) return 0.0;
  return std::max(0.0, 0.5 * (a + std::sqrt(disc)));
}

struct Level {
  Grid grid;
  DiscreteEigen eig;
};

Level solve_level(double a, double h_max, std::size_t intervals, double hint) {
  Level l{Grid::sqrt_uniform(h_max, intervals), {}};
  l.eig = discrete_principal(a, l.grid, hint);
  return l;
}

// Richardson table on h^2 = (ds)^2 halving: returns best value and the
// difference between the two highest-order entries.
std::pair<double, double> richardson(const std::vector<double>& raw) {
  std::vector<std::vector<double>> t(raw.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    t[l].push_back(raw[l]);
    double factor = 1.0;
    for (std::size_t j = 1; j <= l; ++j) {
      factor *= 4.0;
      t[l].push_back(t[l][j - 1] + (t[l][j - 1] - t[l - 1][j - 1]) / (factor - 1.0));
    }
  }
  const auto& last = t.back();
  if (raw.size() < 2) return {last.back(), std::abs(last.back())};
  const double prev = t[raw.size() - 2].back();
  return {last.back(), std::abs(last.back() - prev)};
}

}  // namespace

void SolverConfig::validate() const {
  if (n < 64) throw DomainError("SolverConfig: n must be >= 64");
  if (!(tol > 0.0)) throw DomainError("SolverConfig: tol must be positive");
  if (refine_levels < 1) throw DomainError("SolverConfig: refine_levels must be >= 1");
  if (!std::isfinite(h_max)) throw DomainError("SolverConfig: h_max must be finite");
}

Grid Grid::sqrt_uniform(double h_max, std::size_t intervals) {
  Grid g;
  const double s_max = std::sqrt(h_max);
  const double ds = s_max / static_cast<double>(intervals);
  g.nodes.resize(intervals + 1);
  g.faces.resize(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double s = ds * static_cast<double>(i);
    g.nodes[i] = s * s;
  }
  g.nodes.back() = h_max;
  for (std::size_t i = 0; i < intervals; ++i) {
    const double s = ds * (static_cast<double>(i) + 0.5);
    g.faces[i] = s * s;
  }
  return g;
}

DiscreteEigen discrete_principal(double a, const Grid& grid, double hint) {
  const std::size_t n = grid.intervals();  // unknowns 0..n-1, node n is Dirichlet
  std::vector<double> flux(n), vol(n);
  for (std::size_t i = 0; i < n; ++i) {
    flux[i] = 2.0 * grid.faces[i] / (grid.nodes[i + 1] - grid.nodes[i]);
    vol[i] = grid.volume(i);
  }
  tridiag::SymTridiag m;
  m.diag.resize(n);
  m.off.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = grid.nodes[i];
    const double left = i > 0 ? flux[i - 1] : 0.0;
    m.diag[i] = (-(flux[i] + left) + (a * h - h * h) * vol[i]) / vol[i];
    if (i + 1 < n) m.off[i] = flux[i] / std::sqrt(vol[i] * vol[i + 1]);
  }
  auto pair = tridiag::principal_pair(m, 4, hint);
  DiscreteEigen out;
  out.rho = pair.value;
  out.x.resize(n + 1);
  double sign = 0.0;
  for (double v : pair.vector) sign += v;
  sign = sign < 0.0 ? -1.0 : 1.0;
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.x[i] = sign * pair.vector[i] / std::sqrt(vol[i]);
    mass += out.x[i] * out.x[i] * vol[i];
    first += grid.nodes[i] * out.x[i] * out.x[i] * vol[i];
  }
  out.x[n] = 0.0;
  const double norm = std::sqrt(mass);
  for (double& v : out.x) v /= norm;
  out.rho1 = first / mass;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.x[i] > 0.0)) {
      std::ostringstream os;
      os << "principal eigenvector changes sign at h = " << grid.nodes[i] << " (a = " << a << ")";
      throw DegeneracyError(os.str());
    }
  }
  return out;
}

double auto_h_max(double a, double exponent) {
  const double rho = rho_guess(a);
  double h = std::max(turning_point(a, rho), 1e-6);
  // march outward integrating the WKB rate until the exponent is reached
  double acc = 0.0;
  double step = std::max(1e-4, 0.01 / std::max(1.0, std::sqrt(std::abs(a))));
  while (acc < exponent) {
    const double k0 = wkb_rate(a, rho, h);
    const double k1 = wkb_rate(a, rho, h + step);
    acc += 0.5 * (k0 + k1) * step;
    h += step;
    step *= 1.02;
  }
  return h;
}

double EigenSolution::log_eval(double h) const {
  if (h < 0.0) throw DomainError("EigenSolution::eval: h must be non-negative");
  const std::size_t last = tail_index_;
  if (h > grid[last]) {
    // WKB continuation of the decaying tail
    double acc = 0.0;
    const double h0 = grid[last];
    const int steps = 64;
    const double dh = (h - h0) / steps;
    for (int k = 0; k < steps; ++k) {
      const double u = h0 + (k + 0.5) * dh;
      acc += wkb_rate(a, rho, u) * dh;
    }
    return std::log(xvals[last]) - acc;
  }
  auto it = std::upper_bound(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(last) + 1, h);
  std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - grid.begin())) - 1;
  // 4-point Lagrange stencil on log x
  std::size_t lo = j >= 1 ? j - 1 : 0;
  if (lo + 3 > last) lo = last - 3;
  double result = 0.0;
  for (std::size_t p = lo; p < lo + 4; ++p) {
    double w = 1.0;
    for (std::size_t q = lo; q < lo + 4; ++q) {
      if (q != p) w *= (h - grid[q]) / (grid[p] - grid[q]);
    }
    result += w * std::log(xvals[p]);
  }
  return result;
}

double EigenSolution::eval(double h) const { return std::exp(log_eval(h)); }

double EigenSolution::residual() const {
  const std::size_t n = grid.size() - 1;
  double num = 0.0;
  double den = 0.0;
  const Grid g = Grid::sqrt_uniform(h_max, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = 2.0 * g.faces[i] * (xvals[i + 1] - xvals[i]) / (g.nodes[i + 1] - g.nodes[i]);
    const double left = i > 0 ? 2.0 * g.faces[i - 1] * (xvals[i] - xvals[i - 1]) / (g.nodes[i] - g.nodes[i - 1]) : 0.0;
    const double vol = g.volume(i);
    const double h = g.nodes[i];
    const double r = (right - left) / vol + (a * h - h * h) * xvals[i] - rho * xvals[i];
    if (i > 0) num += r * r * vol;
    den += xvals[i] * xvals[i] * vol;
  }
  return std::sqrt(num / den);
}

EigenSolution principal_eigen(double a, const SolverConfig& cfg) {
  if (!std::isfinite(a)) throw DomainError("principal_eigen: a must be finite");
  cfg.validate();

  const double h_max = cfg.h_max > 0.0 ? cfg.h_max : auto_h_max(a, kTailExponent);

  std::vector<double> raw_rho, raw_rho1;
  Level finest;
  double best = 0.0, best1 = 0.0, achieved = 0.0;
  const int max_levels = cfg.refine_levels + kMaxExtraLevels;
  for (int l = 0; l < max_levels; ++l) {
    finest = solve_level(a, h_max, cfg.n << l,
                         raw_rho.empty() ? std::numeric_limits<double>::quiet_NaN() : raw_rho.back());
    raw_rho.push_back(finest.eig.rho);
    raw_rho1.push_back(finest.eig.rho1);
    if (l + 1 < cfg.refine_levels) continue;
    std::tie(best, achieved) = richardson(raw_rho);
    best1 = richardson(raw_rho1).first;
    // the finest grid must also be close enough for its eigenfunction to
    // carry a small residual against the extrapolated eigenvalue
    const bool fine_enough = std::abs(finest.eig.rho - best) <= kGridResidual;
    if (achieved <= cfg.tol * std::max(1.0, std::abs(best)) && (fine_enough || l + 1 == max_levels)) break;
    if (l + 1 == max_levels) {
      std::ostringstream os;
      os << "principal_eigen: Richardson extrapolation at a = " << a << " stalled; last two estimates "
         << best << " differ by " << achieved << " > tol " << cfg.tol;
      throw SolverError(os.str());
    }
  }

  EigenSolution sol;
  sol.a = a;
  sol.rho = best;
  sol.rho1 = best1;
  sol.achieved_tol = achieved;
  sol.h_max = h_max;
  sol.n = finest.grid.intervals();
  sol.grid = std::move(finest.grid.nodes);
  sol.xvals = std::move(finest.eig.x);
  sol.level_rho = std::move(raw_rho);
  const Grid g = Grid::sqrt_uniform(h_max, sol.n);
  sol.volume_.resize(sol.n);
  for (std::size_t i = 0; i < sol.n; ++i) sol.volume_[i] = g.volume(i);
  const double trusted = 0.9 * h_max;
  sol.tail_index_ = static_cast<std::size_t>(
      std::upper_bound(sol.grid.begin(), sol.grid.end(), trusted) - sol.grid.begin() - 1);
  sol.tail_index_ = std::max<std::size_t>(sol.tail_index_, 3);
  return sol;
}

RhoDerivatives rho_derivative(double a, const SolverConfig& cfg) {
  RhoDerivatives d;
  d.rho1 = principal_eigen(a, cfg).rho1;
  double step = 1e-3;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < 12; ++k) {
    const double up = principal_eigen(a + step, cfg).rho1;
    const double dn = principal_eigen(a - step, cfg).rho1;
    const double est = (up - dn) / (2.0 * step);
    if (std::isfinite(prev) && std::abs(est - prev) <= 1e-5 * std::abs(est)) {
      d.rho2 = est;
      return d;
    }
    prev = est;
    step *= 0.5;
  }
  d.rho2 = prev;
  return d;
}

double rayleigh_lower_bound(double a) {
  if (!(a < 0.0)) throw DomainError("rayleigh_lower_bound: requires a < 0");
  // unit-norm trial function y(h) = 2^{1/4} e^{-h/sqrt 2}:
  // int_0^inf h^2 y^2 dh = sqrt(2) * 2 / sqrt(2)^3 = 1
  const double second_moment = 1.0;
  return -std::numbers::sqrt2 * std::sqrt(-a) - second_moment / (-a);
}

}  // namespace edwards::sturm
