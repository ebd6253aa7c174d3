#include "edwards/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "edwards/errors.hpp"

namespace edwards::rate {
namespace {

constexpr double kBranchSwitch = 1e-6;
constexpr double kRootTol = 1e-13;

// Vertex of the parabola through (x0,g0), (x1,g1), (x2,g2); falls back to
// the middle sample if the parabola does not open downward.
std::pair<double, double> parabola_max(double x0, double g0, double x1, double g1, double x2, double g2) {
  const double d01 = (g1 - g0) / (x1 - x0);
  const double d12 = (g2 - g1) / (x2 - x1);
  const double c2 = (d12 - d01) / (x2 - x0);
  if (!(c2 < 0.0)) return {x1, g1};
  const double c1 = d01 - c2 * (x0 + x1);
  const double xv = std::clamp(-c1 / (2.0 * c2), x0, x2);
  const double gv = g0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
  return {xv, gv};
}

template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace

std::string to_string(MgfBranch b) { return b == MgfBranch::flat ? "flat" : "convex"; }
std::string to_string(RateBranch b) { return b == RateBranch::linear ? "linear" : "convex"; }

std::size_t grid_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("grid: need step > 0 and max >= min");
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double discrete_conjugate(std::span<const double> x, std::span<const double> f, double s) {
  const std::size_t n = x.size();
  std::size_t best = 0;
  double gbest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = s * x[i] - f[i];
    if (g > gbest) {
      gbest = g;
      best = i;
    }
  }
  if (best == 0 || best + 1 == n) return gbest;
  auto g = [&](std::size_t i) { return s * x[i] - f[i]; };
  return parabola_max(x[best - 1], g(best - 1), x[best], g(best), x[best + 1], g(best + 1)).second;
}

RateModel::RateModel(const sturm::SolverConfig& cfg) : RateModel(cfg, constants::compute_constants(cfg)) {}

RateModel::RateModel(const sturm::SolverConfig& cfg, const constants::ModelConstants& c) : cfg_(cfg), c_(c) {
  cfg_.validate();
}

RateModel::Eval RateModel::eval(double a) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(a); it != memo_.end()) return it->second;
  }
  const auto s = sturm::principal_eigen(a, cfg_);
  const Eval e{s.rho, s.rho1};
  std::lock_guard lock(mu_);
  memo_.emplace(a, e);
  return e;
}

double RateModel::rho(double a) const { return eval(a).rho; }
double RateModel::rho1(double a) const { return eval(a).rho1; }

MgfPoint RateModel::lambda_plus(double mu) const {
  if (!std::isfinite(mu)) throw DomainError("lambda_plus: mu must be finite");
  MgfPoint p;
  p.mu = mu;
  if (mu <= -c_.rho_a_dstar) {
    p.value = -c_.a_dstar;
    p.a = c_.a_dstar;
    p.branch = MgfBranch::flat;
    return p;
  }
  // rho(a) = -mu with a < a**; rho(a) >= -sqrt(2)(-a)^{1/2} - O(1/|a|) fixes the bracket
  double hi = c_.a_dstar;
  double lo = std::min(c_.a_star - 1.0, -0.5 * mu * mu - 1.0);
  for (int k = 0; rho(lo) + mu > 0.0; ++k) {
    if (k > 40) throw SolverError("lambda_plus: cannot bracket rho(a) = -mu");
    hi = lo;
    lo = 2.0 * lo - 1.0;
  }
  std::uintmax_t iters = 60;
  auto f = [&](double a) {
    const Eval e = eval(a);
    return std::make_pair(e.rho + mu, e.rho1);
  };
  const double guess = std::clamp(mu > 0.0 ? -0.5 * mu * mu : c_.a_star + mu / c_.rho1_star, lo, hi);
  const double a = boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 48, iters);
  if (iters >= 60) throw SolverError("lambda_plus: Newton iteration did not converge");
  p.a = a;
  p.value = -a;
  p.branch = MgfBranch::convex;
  return p;
}

double RateModel::lambda_full(double mu) const { return lambda_plus(std::abs(mu)).value; }

RatePoint RateModel::rate_I(double b) const {
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("rate_I: b must be finite and non-negative");
  RatePoint p;
  p.b = b;
  if (b <= c_.b_dstar + kBranchSwitch) {
    p.branch = RateBranch::linear;
    p.a_b = c_.a_dstar;
    p.value = -b * c_.rho_a_dstar + c_.a_dstar;
    p.derivative = -c_.rho_a_dstar;
    return p;
  }
  const double target = 1.0 / b;
  auto g = [&](double a) { return rho1(a) - target; };
  double hi = c_.a_dstar;
  double lo = std::min(c_.a_star - 0.5, -0.5 * b * b - 1.0);
  double glo = g(lo);
  for (int k = 0; glo > 0.0; ++k) {
    if (k > 40) {
      std::ostringstream os;
      os << "rate_I: cannot bracket rho'(a) = 1/b at b = " << b;
      throw SolverError(os.str());
    }
    hi = lo;
    lo = 2.0 * lo - 1.0;
    glo = g(lo);
  }
  const double ghi = g(hi);
  std::uintmax_t iters = 80;
  auto stop = [](double x, double y) { return std::abs(x - y) <= kRootTol * std::max(1.0, std::abs(x)); };
  const auto [r0, r1] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, stop, iters);
  const double a = 0.5 * (r0 + r1);
  const double r = rho(a);
  p.branch = RateBranch::convex;
  p.a_b = a;
  p.value = -b * r + a;
  p.derivative = -r;
  return p;
}

double RateModel::beta_scale(double beta, double b) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta_scale: beta must be positive");
  const double s = std::cbrt(beta);
  return s * s * rate_I(std::abs(b) / s).value;
}

LegendreReport RateModel::legendre_check(std::span<const double> b_grid, std::span<const double> mu_grid) const {
  if (b_grid.empty() || mu_grid.empty()) throw DomainError("legendre_check: empty grid");
  std::vector<double> lam(mu_grid.size());
  for (std::size_t i = 0; i < mu_grid.size(); ++i) lam[i] = lambda_plus(mu_grid[i]).value;

  LegendreReport rep;
  for (double b : b_grid) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < mu_grid.size(); ++i) {
      if (b * mu_grid[i] - lam[i] > b * mu_grid[best] - lam[best]) best = i;
    }
    const double lo = mu_grid[best == 0 ? 0 : best - 1];
    const double hi = mu_grid[std::min(best + 1, mu_grid.size() - 1)];
    auto obj = [&](double m) { return b * m - lambda_plus(m).value; };
    double arg = mu_grid[best];
    double val = b * arg - lam[best];
    if (hi > lo) {
      const double m = golden_max(obj, lo, hi, 1e-6);
      const double v = obj(m);
      if (v > val) {
        arg = m;
        val = v;
      }
    }
    const auto rp = rate_I(b);
    LegendreRow row;
    row.b = b;
    row.rate = rp.value;
    row.legendre = val;
    row.gap = std::abs(val - rp.value);
    row.argmax = arg;
    row.expected_argmax = rp.branch == RateBranch::linear ? -c_.rho_a_dstar : -rho(rp.a_b);
    rep.max_gap = std::max(rep.max_gap, row.gap);
    rep.rows.push_back(row);
  }
  return rep;
}

InvolutionReport RateModel::involution_check(double mu_lo, double mu_hi, double dmu) const {
  if (!(mu_hi > mu_lo) || !(dmu > 0.0)) throw DomainError("involution_check: bad range");
  // parametric samples of Lambda+, ascending in mu
  std::vector<double> mus, lams;
  const double kink = -c_.rho_a_dstar;
  for (int j = 60; j >= 1; --j) {
    mus.push_back(kink - dmu * j);
    lams.push_back(-c_.a_dstar);
  }
  const double mu_top = mu_hi + 2.0;
  double a = c_.a_dstar;
  while (true) {
    const Eval e = eval(a);
    mus.push_back(-e.rho);
    lams.push_back(-a);
    if (-e.rho > mu_top) break;
    a -= dmu / e.rho1;
  }
  // I on a b-grid, then back
  const double b_top = 1.0 / rho1(a) + 0.5;
  const double db = dmu / 2.0;
  std::vector<double> bs, is;
  for (std::size_t k = 0, n = grid_count(0.0, b_top, db); k < n; ++k) {
    const double b = db * static_cast<double>(k);
    bs.push_back(b);
    is.push_back(discrete_conjugate(mus, lams, b));
  }
  InvolutionReport rep;
  rep.samples = mus.size();
  for (std::size_t k = 0, n = grid_count(mu_lo, mu_hi, 0.05); k < n; ++k) {
    const double m = mu_lo + 0.05 * static_cast<double>(k);
    const double back = discrete_conjugate(bs, is, m);
    const double err = std::abs(back - lambda_plus(m).value);
    if (err > rep.max_error) {
      rep.max_error = err;
      rep.worst_mu = m;
    }
  }
  return rep;
}

RateCurve RateModel::rate_curve(double bmin, double bmax, double step, double beta) const {
  if (!(beta > 0.0)) throw DomainError("rate_curve: beta must be positive");
  RateCurve curve;
  curve.constants = c_;
  const double s = std::cbrt(beta);
  const std::size_t n = grid_count(bmin, bmax, step);
  curve.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double b = bmin + step * static_cast<double>(k);
    RatePoint p = rate_I(std::abs(b) / s);
    p.b = b;
    p.value *= s * s;
    p.derivative *= (b < 0.0 ? -s : s);
    curve.points.push_back(p);
  }
  return curve;
}

MgfCurve RateModel::mgf_curve(double mumin, double mumax, double step) const {
  MgfCurve curve;
  curve.constants = c_;
  const std::size_t n = grid_count(mumin, mumax, step);
  for (std::size_t k = 0; k < n; ++k) curve.points.push_back(lambda_plus(mumin + step * static_cast<double>(k)));
  return curve;
}

}  // namespace edwards::rate
