#pragma once

#include <cstddef>
#include <vector>

namespace edwards::airy {

/// Ai, Ai', Bi, Bi' at a real argument.
struct AiryValue {
  double x = 0.0;
  double ai = 0.0;
  double aip = 0.0;
  double bi = 0.0;
  double bip = 0.0;
};

/// Inside (-kAsymptoticRadius, kAsymptoticRadius) values come from local
/// Taylor re-expansion around a tabulated node set seeded by the Maclaurin
/// values at the origin; outside, from the classical asymptotic expansions.
/// At this radius the smallest asymptotic term is below 1e-16 relative.
inline constexpr double kAsymptoticRadius = 9.5;

/// Largest |x| accepted by airy_eval.
inline constexpr double kMaxArgument = 200.0;

/// Evaluate Ai, Ai', Bi, Bi'. Bi and Bi' overflow to +inf for x > ~104.
/// Throws DomainError for non-finite x and RangeError for |x| > kMaxArgument.
AiryValue airy_eval(double x);

/// Convenience wrappers.
double ai(double x);
double aip(double x);

/// Maclaurin-series evaluation, usable as a reference for small |x|.
/// Summed in long double; loses accuracy to cancellation once |x| grows
/// past ~5 (Ai on the positive axis in particular).
AiryValue airy_maclaurin(double x);

/// Zeros a_0 > a_1 > ... of Ai together with Ai'(a_k).
struct AiryZeroTable {
  std::vector<double> zeros;
  std::vector<double> slopes;
  std::size_t count() const { return zeros.size(); }
};

/// First K zeros of Ai: asymptotic initial guess, bracketed and refined by
/// bisection-safeguarded Newton. Throws DomainError for K == 0 and
/// SolverError (with k and the bracket) if a bracket cannot be found.
AiryZeroTable airy_zeros(std::size_t K);

/// Asymptotic location of the k-th zero (k = 0, 1, ...).
double airy_zero_guess(std::size_t k);

}  // namespace edwards::airy
