#include "edwards/airy.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "edwards/errors.hpp"

namespace edwards::airy {
namespace {

using ld = long double;

constexpr ld kAi0 = 0.355028053887817239260063186004183176L;
constexpr ld kAip0 = -0.258819403792806798405183560189203963L;
constexpr ld kBi0 = 0.614926627446000735150922369093613553L;
constexpr ld kBip0 = 0.448288357353826357914823710398828390L;

constexpr double kNodeSpacing = 0.25;
constexpr int kNodesPerSide = 38;  // 38 * 0.25 = 9.5
static_assert(kNodesPerSide * kNodeSpacing == kAsymptoticRadius);

struct State {
  ld y;
  ld yp;
};

// Taylor step for y'' = x y from x0 to x0 + h. The coefficients obey
// c_{n+2} (n+2)(n+1) = x0 c_n + c_{n-1}.
template <typename T>
std::array<T, 2> taylor_step(T x0, T y0, T y1, T h) {
  T cm1 = 0;  // c_{n-1}
  T cn = y0;  // c_n
  T cn1 = y1; // c_{n+1}
  T hp = 1;   // h^n
  T val = 0;
  T der = 0;  // accumulates n c_n h^{n-1}
  T hpm1 = 0; // h^{n-1}
  int small_run = 0;
  for (int n = 0; n < 120; ++n) {
    const T term = cn * hp;
    val += term;
    if (n > 0) der += static_cast<T>(n) * cn * hpm1;
    const T cn2 = (x0 * cn + cm1) / static_cast<T>((n + 2) * (n + 1));
    cm1 = cn;
    cn = cn1;
    cn1 = cn2;
    hpm1 = hp;
    hp *= h;
    const T scale = std::abs(val) + std::abs(der) + std::numeric_limits<T>::min();
    if (std::abs(term) < std::numeric_limits<T>::epsilon() * 1e-3 * scale) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }
  return {val, der};
}

// Coefficients u_k, v_k of the asymptotic expansions.
template <typename T>
struct AsymptoticCoefficients {
  static constexpr int kTerms = 80;
  std::array<T, kTerms> u{};
  std::array<T, kTerms> v{};
  AsymptoticCoefficients() {
    u[0] = 1;
    v[0] = 1;
    for (int k = 1; k < kTerms; ++k) {
      const T kk = static_cast<T>(k);
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
      v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
  }
};

template <typename T>
const AsymptoticCoefficients<T>& coefficients() {
  static const AsymptoticCoefficients<T> c;
  return c;
}

// Sum of sign^k c_k zeta^{-k} over the stride/offset subsequence, stopping at
// the smallest term of the divergent series.
template <typename T>
T asym_sum(const std::array<T, AsymptoticCoefficients<T>::kTerms>& c, T zeta, int offset, int stride,
           bool alternate) {
  T sum = 0;
  T prev = std::numeric_limits<T>::infinity();
  int sign = 1;
  for (int k = offset; k < AsymptoticCoefficients<T>::kTerms; k += stride) {
    const T term = c[k] * std::pow(zeta, -static_cast<T>(k));
    if (std::abs(term) > prev) break;
    sum += sign * term;
    prev = std::abs(term);
    if (alternate) sign = -sign;
    if (prev < std::numeric_limits<T>::epsilon() * 1e-2 * std::abs(sum)) break;
  }
  return sum;
}

template <typename T>
void asymptotic_positive(T x, T& ai, T& aip, T& bi, T& bip) {
  const auto& c = coefficients<T>();
  const T zeta = T(2) / 3 * x * std::sqrt(x);
  const T x14 = std::sqrt(std::sqrt(x));
  const T sqrt_pi = std::sqrt(std::numbers::pi_v<T>);
  const T su_alt = asym_sum(c.u, zeta, 0, 1, true);
  const T sv_alt = asym_sum(c.v, zeta, 0, 1, true);
  const T su = asym_sum(c.u, zeta, 0, 1, false);
  const T sv = asym_sum(c.v, zeta, 0, 1, false);
  const T decay = std::exp(-zeta);
  const T growth = std::exp(zeta);
  ai = decay / (2 * sqrt_pi * x14) * su_alt;
  aip = -x14 * decay / (2 * sqrt_pi) * sv_alt;
  bi = growth / (sqrt_pi * x14) * su;
  bip = x14 * growth / sqrt_pi * sv;
}

// Series in zeta^{-2k} and zeta^{-2k-1} with alternating signs.
template <typename T>
T alt_even(const std::array<T, AsymptoticCoefficients<T>::kTerms>& c, T zeta) {
  return asym_sum(c, zeta, 0, 2, true);
}
template <typename T>
T alt_odd(const std::array<T, AsymptoticCoefficients<T>::kTerms>& c, T zeta) {
  return asym_sum(c, zeta, 1, 2, true);
}

template <typename T>
void asymptotic_negative(T x, T& ai, T& aip, T& bi, T& bip) {
  const auto& c = coefficients<T>();
  const T z = -x;
  const T zeta = T(2) / 3 * z * std::sqrt(z);
  const T z14 = std::sqrt(std::sqrt(z));
  const T inv_sqrt_pi = 1 / std::sqrt(std::numbers::pi_v<T>);
  const T s = std::sin(zeta);
  const T co = std::cos(zeta);
  const T r = 1 / std::sqrt(T(2));
  const T sin_t = (s + co) * r;  // sin(zeta + pi/4)
  const T cos_t = (co - s) * r;  // cos(zeta + pi/4)
  const T pu = alt_even(c.u, zeta);
  const T qu = alt_odd(c.u, zeta);
  const T pv = alt_even(c.v, zeta);
  const T qv = alt_odd(c.v, zeta);
  ai = inv_sqrt_pi / z14 * (sin_t * pu - cos_t * qu);
  bi = inv_sqrt_pi / z14 * (cos_t * pu + sin_t * qu);
  aip = -inv_sqrt_pi * z14 * (cos_t * pv + sin_t * qv);
  bip = inv_sqrt_pi * z14 * (sin_t * pv - cos_t * qv);
}

// Node table: Ai, Ai', Bi, Bi' at x_j = j * kNodeSpacing, j in [-38, 38].
struct NodeTable {
  static constexpr int kCount = 2 * kNodesPerSide + 1;
  std::array<State, kCount> ai{};
  std::array<State, kCount> bi{};

  NodeTable() {
    const int mid = kNodesPerSide;
    ai[mid] = {kAi0, kAip0};
    bi[mid] = {kBi0, kBip0};
    const ld step = kNodeSpacing;
    // Bi is dominant on both sides and Ai is bounded for x < 0: step outward.
    for (int j = 1; j <= kNodesPerSide; ++j) {
      const ld x0 = (j - 1) * step;
      auto b = taylor_step<ld>(x0, bi[mid + j - 1].y, bi[mid + j - 1].yp, step);
      bi[mid + j] = {b[0], b[1]};
      const ld xm = -(j - 1) * step;
      auto bm = taylor_step<ld>(xm, bi[mid - j + 1].y, bi[mid - j + 1].yp, -step);
      bi[mid - j] = {bm[0], bm[1]};
      auto am = taylor_step<ld>(xm, ai[mid - j + 1].y, ai[mid - j + 1].yp, -step);
      ai[mid - j] = {am[0], am[1]};
    }
    // Ai decays for x > 0; step inward from the asymptotic value at the edge
    // so the recessive solution is the growing one.
    ld a, ap, b, bp;
    asymptotic_positive<ld>(static_cast<ld>(kAsymptoticRadius), a, ap, b, bp);
    ai[2 * kNodesPerSide] = {a, ap};
    for (int j = kNodesPerSide - 1; j >= 1; --j) {
      const ld x0 = (j + 1) * step;
      auto r = taylor_step<ld>(x0, ai[mid + j + 1].y, ai[mid + j + 1].yp, -step);
      ai[mid + j] = {r[0], r[1]};
    }
  }
};

const NodeTable& nodes() {
  static const NodeTable table;
  return table;
}

void check_argument(double x) {
  if (!std::isfinite(x)) throw DomainError("airy_eval: non-finite argument");
  if (std::abs(x) > kMaxArgument) {
    std::ostringstream os;
    os << "airy_eval: |x| = " << std::abs(x) << " exceeds documented range " << kMaxArgument;
    throw RangeError(os.str());
  }
}

}  // namespace

AiryValue airy_eval(double x) {
  check_argument(x);
  AiryValue out;
  out.x = x;
  if (x >= kAsymptoticRadius) {
    asymptotic_positive<double>(x, out.ai, out.aip, out.bi, out.bip);
    return out;
  }
  if (x <= -kAsymptoticRadius) {
    asymptotic_negative<double>(x, out.ai, out.aip, out.bi, out.bip);
    return out;
  }
  const auto& t = nodes();
  const int j = static_cast<int>(std::lround(x / kNodeSpacing));
  const double x0 = j * kNodeSpacing;
  const double h = x - x0;
  const State& a = t.ai[j + kNodesPerSide];
  const State& b = t.bi[j + kNodesPerSide];
  const auto ra = taylor_step<double>(x0, static_cast<double>(a.y), static_cast<double>(a.yp), h);
  const auto rb = taylor_step<double>(x0, static_cast<double>(b.y), static_cast<double>(b.yp), h);
  out.ai = ra[0];
  out.aip = ra[1];
  out.bi = rb[0];
  out.bip = rb[1];
  return out;
}

double ai(double x) { return airy_eval(x).ai; }
double aip(double x) { return airy_eval(x).aip; }

AiryValue airy_maclaurin(double xd) {
  check_argument(xd);
  const ld x = xd;
  const ld x3 = x * x * x;
  ld f = 1, g = x, fp = 0, gp = 1;
  ld tf = 1, tg = x, df = x * x / 2, dg = 1;
  fp = df;
  for (int k = 1; k < 400; ++k) {
    tf *= x3 / static_cast<ld>((3 * k - 1) * (3 * k));
    tg *= x3 / static_cast<ld>((3 * k) * (3 * k + 1));
    f += tf;
    g += tg;
    if (k >= 2) {
      df *= x3 / static_cast<ld>((3 * k - 1) * (3 * k - 3));
      fp += df;
    }
    dg *= x3 / static_cast<ld>((3 * k - 2) * (3 * k));
    gp += dg;
    const ld scale = std::abs(f) + std::abs(g) + 1;
    if (std::abs(tf) + std::abs(tg) + std::abs(df) + std::abs(dg) < 1e-22L * scale) break;
  }
  const ld c1 = kAi0;
  const ld c2 = -kAip0;
  const ld sqrt3 = std::sqrt(3.0L);
  AiryValue out;
  out.x = xd;
  out.ai = static_cast<double>(c1 * f - c2 * g);
  out.aip = static_cast<double>(c1 * fp - c2 * gp);
  out.bi = static_cast<double>(sqrt3 * (c1 * f + c2 * g));
  out.bip = static_cast<double>(sqrt3 * (c1 * fp + c2 * gp));
  return out;
}

double airy_zero_guess(std::size_t k) {
  const double t = 3.0 * std::numbers::pi * (4.0 * static_cast<double>(k) + 3.0) / 8.0;
  const double t2 = 1.0 / (t * t);
  const double series = 1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0)));
  return -std::pow(t, 2.0 / 3.0) * series;
}

AiryZeroTable airy_zeros(std::size_t K) {
  if (K == 0) throw DomainError("airy_zeros: K must be positive");
  AiryZeroTable table;
  table.zeros.reserve(K);
  table.slopes.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double guess = airy_zero_guess(k);
    const double gap = std::numbers::pi / std::sqrt(std::abs(guess));
    double lo = guess - 0.3 * gap;
    double hi = guess + 0.3 * gap;
    if (!table.zeros.empty()) hi = std::min(hi, table.zeros.back() - 1e-3 * gap);
    double flo = ai(lo);
    double fhi = ai(hi);
    if (flo * fhi > 0.0) {
      std::ostringstream os;
      os << "airy_zeros: no sign change for k = " << k << " in bracket [" << lo << ", " << hi << "]";
      throw SolverError(os.str());
    }
    double x = guess;
    for (int it = 0; it < 100; ++it) {
      const AiryValue v = airy_eval(x);
      if (v.ai == 0.0) break;
      if ((v.ai < 0.0) == (flo < 0.0)) {
        lo = x;
        flo = v.ai;
      } else {
        hi = x;
        fhi = v.ai;
      }
      double next = x - v.ai / v.aip;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
    }
    table.zeros.push_back(x);
    table.slopes.push_back(aip(x));
  }
  return table;
}

}  // namespace edwards::airy
