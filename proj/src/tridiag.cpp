#include "edwards/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edwards/errors.hpp"

namespace edwards::tridiag {

std::size_t count_below(const SymTridiag& m, double lambda) {
  const std::size_t n = m.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double p = m.diag[0] - lambda;
  for (std::size_t i = 0;; ++i) {
    if (p == 0.0) p = -tiny;
    if (p < 0.0) ++count;
    if (i + 1 == n) break;
    p = (m.diag[i + 1] - lambda) - m.off[i] * m.off[i] / p;
  }
  return count;
}

double largest_eigenvalue(const SymTridiag& m) {
  const std::size_t n = m.size();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(m.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(m.off[i]) : 0.0);
    lo = std::max(lo, m.diag[i]);
    hi = std::max(hi, m.diag[i] + r);
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(m, mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void solve(std::span<const double> lower, std::span<const double> diag,
           std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double d = diag[0];
  if (d == 0.0) throw NumericError("tridiag::solve: zero pivot");
  c[0] = n > 1 ? upper[0] / d : 0.0;
  rhs[0] /= d;
  for (std::size_t i = 1; i < n; ++i) {
    d = diag[i] - lower[i - 1] * c[i - 1];
    if (d == 0.0) throw NumericError("tridiag::solve: zero pivot");
    c[i] = i + 1 < n ? upper[i] / d : 0.0;
    rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / d;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

namespace {

EigenPair inverse_iteration(const SymTridiag& m, double shift, int iterations) {
  const std::size_t n = m.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = m.diag[i] - shift;
  std::vector<double> y(n, 1.0);
  for (int it = 0; it < iterations; ++it) {
    solve(m.off, diag, m.off, y);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (!std::isfinite(norm) || norm == 0.0) throw SolverError("inverse iteration produced a non-finite iterate");
    for (double& v : y) v /= norm;
  }
  double rq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double by = m.diag[i] * y[i];
    if (i > 0) by += m.off[i - 1] * y[i - 1];
    if (i + 1 < n) by += m.off[i] * y[i + 1];
    rq += y[i] * by;
  }
  return {rq, std::move(y)};
}

}  // namespace

EigenPair principal_pair(const SymTridiag& m, int iterations, double hint) {
  if (std::isfinite(hint)) {
    // a nearby estimate (e.g. from a coarser grid) replaces the bisection;
    // one Sturm count confirms that the result is the top of the spectrum
    const double scale = std::max(1.0, std::abs(hint));
    auto pair = inverse_iteration(m, hint + 1e-9 * scale, iterations + 1);
    if (count_below(m, pair.value + 1e-8 * scale) == m.size()) return pair;
  }
  const double lambda = largest_eigenvalue(m);
  return inverse_iteration(m, lambda + 1e-11 * std::max(1.0, std::abs(lambda)), iterations);
}

}  // namespace edwards::tridiag
