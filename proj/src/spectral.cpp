#include "edwards/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "edwards/airy.hpp"
#include "edwards/errors.hpp"
#include "edwards/tridiag.hpp"

namespace edwards::spectral {
namespace {

const double kCbrt2 = std::cbrt(2.0);
const double kS = 1.0 / std::cbrt(2.0);  // 2^{-1/3}
constexpr double kAiMax = 0.5357;         // sup |Ai| on the real line (~0.53566 near x = -1.0188)
constexpr double kAiUnderflow = 100.0;    // Ai(x) < 1e-289 beyond this

double ai_safe(double x) { return x > kAiUnderflow ? 0.0 : airy::ai(x); }

// Modulus and phase of Ai on the negative axis: Ai(-z) = M(z) sin(theta(z)).
double modulus(double z) {
  const double z3 = 1.0 / (z * z * z);
  return std::sqrt((1.0 + z3 * (5.0 / 32.0 + z3 * 1155.0 / 2048.0)) / (std::numbers::pi * std::sqrt(z)));
}
double phase(double z) {
  const double z3 = 1.0 / (z * z * z);
  return 0.25 * std::numbers::pi + (2.0 / 3.0) * z * std::sqrt(z) * (1.0 + z3 * (5.0 / 32.0 + z3 * 1105.0 / 6144.0));
}
double phase_prime(double z) {
  return std::sqrt(z) - (5.0 / 32.0) * std::pow(z, -2.5) - 3.0 * (1105.0 / 6144.0) * std::pow(z, -5.5);
}

std::vector<double> trapezoid_weights(const std::vector<double>& h) {
  const std::size_t n = h.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = 0.5 * (h[i + 1] - h[i]);
    w[i] += d;
    w[i + 1] += d;
  }
  return w;
}

double y1(double u) {
  if (u == 0.0) return 0.0;
  const auto v = airy::airy_eval(kS * u);
  return v.bi - std::sqrt(3.0) * v.ai;  // Bi(0) / Ai(0) = sqrt(3)
}
double y2(double u) { return ai_safe(kS * u); }

}  // namespace

double a_dstar() {
  static const double v = kCbrt2 * (-airy::airy_zeros(1).zeros[0]);
  return v;
}

double y_kernel(double a, double h) {
  if (!std::isfinite(a) || !std::isfinite(h)) throw DomainError("y_kernel: arguments must be finite");
  if (h < 0.0) throw DomainError("y_kernel: h must be non-negative");
  if (a >= a_dstar()) {
    std::ostringstream os;
    os << "y_kernel: a = " << a << " must be below a** = " << a_dstar();
    throw DomainError(os.str());
  }
  if (h == 0.0) return 1.0;
  return ai_safe(kS * (h - a)) / airy::ai(-kS * a);
}

double EigenBasisElement::operator()(double h) const {
  if (h == 0.0) return 0.0;
  return c * ai_safe(kS * h + zero);
}

double EigenBasisElement::cutoff() const { return kCbrt2 * (10.0 - zero); }

double normalization_closed_form(double slope) { return 1.0 / (std::pow(2.0, 1.0 / 6.0) * std::abs(slope)); }

std::vector<EigenBasisElement> eigenbasis(std::size_t K, const QuadConfig& quad) {
  const auto table = airy::airy_zeros(K);
  std::vector<EigenBasisElement> out(K);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto sq = [](double x) {
    const double v = airy::ai(x);
    return v * v;
  };
  for (std::size_t k = 0; k < K; ++k) {
    auto& e = out[k];
    e.k = k;
    e.zero = table.zeros[k];
    e.slope = table.slopes[k];
    e.a_scaled = kCbrt2 * e.zero;
    // int_0^inf Ai(s h + a_k)^2 dh = 2^{1/3} int_{a_k}^inf Ai(x)^2 dx, split at the nodes
    std::vector<double> pts{e.zero};
    for (std::size_t j = k; j-- > 0;) pts.push_back(table.zeros[j]);
    pts.push_back(0.0);
    pts.push_back(10.0);
    double sum = 0.0, err = 0.0;
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
      double seg_err = 0.0;
      sum += GK::integrate(sq, pts[p], pts[p + 1], quad.max_depth, quad.tol, &seg_err);
      err += seg_err;
    }
    if (err > 1e3 * quad.tol * sum) {
      std::ostringstream os;
      os << "eigenbasis: quadrature for c_" << k << " reached only " << err / sum << " relative error";
      throw NumericError(os.str());
    }
    sum *= kCbrt2;
    e.c = 1.0 / std::sqrt(sum);
    e.quad_error = err / sum;
  }
  return out;
}

std::vector<double> gram_matrix(const std::vector<EigenBasisElement>& basis) {
  const std::size_t K = basis.size();
  double H = 0.0;
  for (const auto& e : basis) H = std::max(H, e.cutoff());
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  std::vector<double> nodes, weights;
  const double panel = 0.25;
  const auto panels = static_cast<std::size_t>(std::ceil(H / panel));
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * panel;
    const double half = 0.5 * panel;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (xs[i] == 0.0 && sgn < 0) continue;
        nodes.push_back(mid + sgn * half * xs[i]);
        weights.push_back(half * ws[i]);
      }
    }
  }
  std::vector<std::vector<double>> vals(K, std::vector<double>(nodes.size()));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < nodes.size(); ++i) vals[k][i] = basis[k](nodes[i]);
  }
  std::vector<double> g(K * K);
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = j; k < K; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * vals[j][i] * vals[k][i];
      g[j * K + k] = g[k * K + j] = s;
    }
  }
  return g;
}

double tail_bound(std::size_t K, double t) {
  const double pref = std::sqrt(2.0) * std::pow(2.0, -1.0 / 6.0) * std::sqrt(std::numbers::pi) * kAiMax;
  double sum = 0.0;
  for (std::size_t k = K;; ++k) {
    const double z = -airy::airy_zero_guess(k);
    const double term = pref * std::pow(z, -0.25) * std::exp(-kCbrt2 * z * t);
    sum += term;
    if (term < 1e-6 * kTailTarget || k > K + 10'000'000) break;
  }
  return sum;
}

double t_min(std::size_t K) {
  double lo = 1e-4, hi = 50.0;
  if (tail_bound(K, lo) <= kTailTarget) return lo;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (tail_bound(K, mid) <= kTailTarget) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

WExpansion w_coefficients(std::size_t K, const QuadConfig& quad) {
  if (K == 0) throw DomainError("w_coefficients: K must be positive");
  WExpansion w;
  w.K = K;
  w.basis = eigenbasis(K, quad);
  w.gamma.resize(K);
  for (std::size_t k = 0; k < K; ++k) w.gamma[k] = kCbrt2 / (w.basis[k].c * w.basis[k].slope);
  w.t_min = t_min(K);
  return w;
}

WValue w_eval(double h, double t, const WExpansion& exp) {
  if (!(h >= 0.0)) throw DomainError("w_eval: h must be non-negative");
  if (!(t >= exp.t_min)) {
    const double bound = tail_bound(exp.K, t);
    std::ostringstream os;
    os << "w_eval: t = " << t << " is below t_min(" << exp.K << ") = " << exp.t_min << "; tail bound " << bound;
    throw AccuracyError(os.str(), bound);
  }
  WValue v;
  for (std::size_t k = 0; k < exp.K; ++k) {
    v.value += exp.gamma[k] * std::exp(exp.basis[k].a_scaled * t) * exp.basis[k](h);
  }
  v.tail_bound = tail_bound(exp.K, t);
  return v;
}

double w_cumulative(double h, double t, const WExpansion& exp) {
  if (!(t >= exp.t_min)) throw AccuracyError("w_cumulative: t below t_min", tail_bound(exp.K, t));
  double s = 0.0;
  for (std::size_t k = 0; k < exp.K; ++k) {
    const auto& e = exp.basis[k];
    s += exp.gamma[k] * e(h) * std::exp(e.a_scaled * t) / (-e.a_scaled);
  }
  return y_kernel(0.0, h) - s;
}

LaplaceResult laplace_reconstruct(double a, double h, const WExpansion& exp) {
  if (a >= a_dstar()) throw DomainError("laplace_reconstruct: a must be below a**");
  if (h < 0.0) throw DomainError("laplace_reconstruct: h must be non-negative");
  LaplaceResult r;
  for (std::size_t k = 0; k < exp.K; ++k) {
    const auto& e = exp.basis[k];
    r.partial += exp.gamma[k] * e(h) / (-a - e.a_scaled);
  }
  if (h == 0.0) return r;

  // remainder sum_{k >= K} f(k) ~ int_{K - 1/2}^inf f(kappa) d kappa, with
  // kappa(z) = theta(z)/pi - 1 and f written through modulus and phase
  const double delta = kS * h;
  const double K = static_cast<double>(exp.K);
  double z = -airy::airy_zero_guess(exp.K);
  for (int it = 0; it < 50; ++it) {
    const double step = (phase(z) - (K + 0.5) * std::numbers::pi) / phase_prime(z);
    z -= step;
    if (std::abs(step) < 1e-14 * z) break;
  }
  auto amp = [&](double u) {
    const double zz = u * u;
    return 2.0 * u * kCbrt2 * modulus(zz - delta) / (std::numbers::pi * modulus(zz) * (-a + kCbrt2 * zz));
  };
  auto ph = [&](double u) { return phase(u * u) - phase(u * u - delta); };
  auto integrand = [&](double u) { return amp(u) * std::sin(ph(u)); };

  const double u0 = std::sqrt(z);
  const double U = std::max(400.0, 2.0 * u0);
  const double chunk = std::numbers::pi / delta;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double integral = 0.0;
  for (double lo = u0; lo < U;) {
    const double hi = std::min(U, lo + chunk);
    integral += GK::integrate(integrand, lo, hi, 10, 1e-12);
    lo = hi;
  }
  // two integrations by parts for [U, inf)
  auto dph = [&](double u) { return 2.0 * u * (phase_prime(u * u) - phase_prime(u * u - delta)); };
  auto q = [&](double u) { return amp(u) / dph(u); };
  const double du = 1e-3 * U;
  const double qp = (q(U + du) - q(U - du)) / (2.0 * du);
  integral += q(U) * std::cos(ph(U)) - qp * std::sin(ph(U)) / dph(U);
  r.tail = integral;
  return r;
}

GridFunction uniform_grid(double h_max, std::size_t intervals) {
  if (intervals == 0 || !(h_max > 0.0)) throw DomainError("uniform_grid: need h_max > 0 and at least one interval");
  GridFunction g;
  g.h.resize(intervals + 1);
  g.u.assign(intervals + 1, 0.0);
  for (std::size_t i = 0; i <= intervals; ++i) g.h[i] = h_max * static_cast<double>(i) / static_cast<double>(intervals);
  return g;
}

double l2_norm(const GridFunction& f) {
  const auto w = trapezoid_weights(f.h);
  double s = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) s += w[i] * f.u[i] * f.u[i];
  return std::sqrt(s);
}

double l2_distance(const GridFunction& f, const GridFunction& g) {
  if (f.h != g.h) throw DomainError("l2_distance: grids differ");
  const auto w = trapezoid_weights(f.h);
  double s = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const double d = f.u[i] - g.u[i];
    s += w[i] * d * d;
  }
  return std::sqrt(s);
}

GridFunction heat_evolve(const GridFunction& initial, double tau, std::size_t steps) {
  const std::size_t N = initial.h.size();
  if (N < 3 || initial.u.size() != N) throw DomainError("heat_evolve: need at least three grid points");
  if (initial.h.front() != 0.0) throw DomainError("heat_evolve: grid must start at h = 0");
  if (!(tau >= 0.0) || steps == 0) throw DomainError("heat_evolve: need tau >= 0 and steps >= 1");
  const std::size_t n = N - 2;  // interior unknowns
  std::vector<double> lo(n), di(n), up(n);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double hm = initial.h[i] - initial.h[i - 1];
    const double hp = initial.h[i + 1] - initial.h[i];
    lo[i - 1] = 4.0 / (hm * (hm + hp));
    up[i - 1] = 4.0 / (hp * (hm + hp));
    di[i - 1] = -(lo[i - 1] + up[i - 1]) - initial.h[i];
  }
  std::vector<double> u(initial.u.begin() + 1, initial.u.end() - 1);
  auto apply = [&](const std::vector<double>& v, double c) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = di[i] * v[i];
      if (i > 0) s += lo[i] * v[i - 1];
      if (i + 1 < n) s += up[i] * v[i + 1];
      r[i] = v[i] + c * s;
    }
    return r;
  };
  auto implicit = [&](std::vector<double>& rhs, double c) {
    std::vector<double> l(n > 0 ? n - 1 : 0), d(n), r(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = 1.0 - c * di[i];
      if (i + 1 < n) {
        r[i] = -c * up[i];
        l[i] = -c * lo[i + 1];
      }
    }
    tridiag::solve(l, d, r, rhs);
  };
  const double dt = tau / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    if (s == 0) {
      for (int q = 0; q < 4; ++q) implicit(u, 0.25 * dt);
    } else {
      auto rhs = apply(u, 0.5 * dt);
      implicit(rhs, 0.5 * dt);
      u.swap(rhs);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(u[i])) {
        std::ostringstream os;
        os << "heat_evolve: non-finite value at step " << s << ", h = " << initial.h[i + 1];
        throw NumericError(os.str());
      }
    }
  }
  GridFunction out{initial.h, std::vector<double>(N, 0.0)};
  std::copy(u.begin(), u.end(), out.u.begin() + 1);
  return out;
}

double green_constant() { return -std::numbers::pi / (kCbrt2 * kCbrt2); }

double green(double u, double v) {
  if (u < 0.0 || v < 0.0) throw DomainError("green: arguments must be non-negative");
  return green_constant() * y1(std::min(u, v)) * y2(std::max(u, v));
}

namespace {

struct GreenTables {
  std::vector<double> w, y1, y2;
};

GreenTables green_tables(const GridFunction& f) {
  GreenTables t;
  t.w = trapezoid_weights(f.h);
  t.y1.resize(f.h.size());
  t.y2.resize(f.h.size());
  for (std::size_t i = 0; i < f.h.size(); ++i) {
    t.y1[i] = y1(f.h[i]);
    t.y2[i] = y2(f.h[i]);
  }
  return t;
}

inline double green_row(const GreenTables& t, const std::vector<double>& f, std::size_t i) {
  double s = 0.0;
  const std::size_t n = f.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double g = j <= i ? t.y1[j] * t.y2[i] : t.y1[i] * t.y2[j];
    s += t.w[j] * g * f[j];
  }
  return green_constant() * s;
}

}  // namespace

GridFunction green_apply(const GridFunction& f) {
  const auto t = green_tables(f);
  GridFunction out{f.h, std::vector<double>(f.h.size(), 0.0)};
  const auto n = static_cast<std::ptrdiff_t>(f.h.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out.u[i] = green_row(t, f.u, static_cast<std::size_t>(i));
  return out;
}

GridFunction green_apply_serial(const GridFunction& f) {
  const auto t = green_tables(f);
  GridFunction out{f.h, std::vector<double>(f.h.size(), 0.0)};
  for (std::size_t i = 0; i < f.h.size(); ++i) out.u[i] = green_row(t, f.u, i);
  return out;
}

double hilbert_schmidt(double L, std::size_t n) {
  const auto g = uniform_grid(L, n);
  const auto t = green_tables(g);
  const double K = green_constant();
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double v = j <= i ? t.y1[j] * t.y2[i] : t.y1[i] * t.y2[j];
      s += t.w[i] * t.w[j] * v * v;
    }
  }
  return K * K * s;
}

}  // namespace edwards::spectral
