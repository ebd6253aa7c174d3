#pragma once

#include <cstddef>
#include <vector>

namespace edwards::spectral {

/// 2^{1/3} (-a_0), the largest a for which y_a is finite.
double a_dstar();

/// y_a(h) = Ai(2^{-1/3}(h - a)) / Ai(-2^{-1/3} a). Throws DomainError for
/// a >= a** and for h < 0.
double y_kernel(double a, double h);

/// e_k(h) = c_k Ai(2^{-1/3} h + a_k), eigenfunction of
/// (K* x)(h) = 2x''(h) - h x(h) with eigenvalue a^{(k)} = 2^{1/3} a_k.
struct EigenBasisElement {
  std::size_t k = 0;
  double zero = 0.0;      ///< a_k
  double slope = 0.0;     ///< Ai'(a_k)
  double a_scaled = 0.0;  ///< a^{(k)}
  double c = 0.0;         ///< c_k, from quadrature
  double quad_error = 0.0;
  double operator()(double h) const;
  /// Point beyond which e_k^2 < 1e-18 relative to its bulk.
  double cutoff() const;
};

struct QuadConfig {
  double tol = 1e-11;    ///< relative Gauss-Kronrod tolerance per segment
  unsigned max_depth = 8;
};

/// First K basis elements with c_k from adaptive Gauss-Kronrod quadrature
/// split at the nodes of e_k. Throws NumericError if a segment misses tol.
std::vector<EigenBasisElement> eigenbasis(std::size_t K, const QuadConfig& quad = {});

/// c_k from int_x^inf Ai^2 = Ai'(x)^2 - x Ai(x)^2, i.e. c_k^{-2} = 2^{1/3} Ai'(a_k)^2.
double normalization_closed_form(double slope);

/// Gram matrix <e_j, e_k> (row-major, K x K) by composite Gauss-Legendre.
std::vector<double> gram_matrix(const std::vector<EigenBasisElement>& basis);

/// Truncated expansion w(h,t) = sum_k gamma_k e^{a^{(k)} t} e_k(h).
struct WExpansion {
  std::size_t K = 0;
  std::vector<double> gamma;
  std::vector<EigenBasisElement> basis;
  double t_min = 0.0;  ///< smallest t with tail bound <= kTailTarget
};

inline constexpr double kTailTarget = 1e-8;

/// gamma_k = 2^{1/3} / (c_k Ai'(a_k)).
WExpansion w_coefficients(std::size_t K, const QuadConfig& quad = {});

/// Bound on sum_{k >= K} |gamma_k| max|e_k| e^{a^{(k)} t}, with zeros past
/// the table from the asymptotic formula.
double tail_bound(std::size_t K, double t);
/// Smallest t with tail_bound(K, t) <= kTailTarget.
double t_min(std::size_t K);

struct WValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Throws AccuracyError (carrying the tail bound) for t < exp.t_min.
WValue w_eval(double h, double t, const WExpansion& exp);

/// int_0^t w(h, s) ds = y_0(h) - sum_k gamma_k e_k(h) e^{a^{(k)} t} / (-a^{(k)}),
/// for t >= exp.t_min.
double w_cumulative(double h, double t, const WExpansion& exp);

/// Termwise Laplace transform sum_k gamma_k e_k(h) / (-a - a^{(k)}).
/// The raw partial sum converges like K^{-1/3}; the tail k >= K is added
/// from the modulus/phase asymptotics of Ai, summed by the midpoint rule
/// as an integral over a continuous k.
struct LaplaceResult {
  double partial = 0.0;  ///< sum over the K retained terms
  double tail = 0.0;     ///< asymptotic estimate of the remainder
  double value() const { return partial + tail; }
};
LaplaceResult laplace_reconstruct(double a, double h, const WExpansion& exp);

/// Values of a function on a strictly increasing grid with h.front() == 0.
struct GridFunction {
  std::vector<double> h;
  std::vector<double> u;
};

GridFunction uniform_grid(double h_max, std::size_t intervals);
/// Trapezoid L2 norm of u, and of the difference of two functions on one grid.
double l2_norm(const GridFunction& f);
double l2_distance(const GridFunction& f, const GridFunction& g);

/// Evolve du/dt = 2u'' - h u over a time span of length tau with Dirichlet
/// values u(h_0) = u(h_N) = 0: Crank-Nicolson with the first step replaced
/// by four implicit Euler quarter steps. Throws NumericError on a
/// non-finite state.
GridFunction heat_evolve(const GridFunction& initial, double tau, std::size_t steps);

/// Green kernel of K*: G(u,v) = K y1(min) y2(max), with
///   y1(u) = Bi(s u) - Bi(0) Ai(s u) / Ai(0),  y2(u) = Ai(s u),  s = 2^{-1/3},
///   K = -1 / (2 y1'(0) y2(0)) = -pi 2^{-2/3},
/// so that x = Gamma f solves 2x'' - h x = f, x(0) = 0, x decaying.
double green(double u, double v);
double green_constant();

/// (Gamma f)(u_i) = sum_j w_j G(u_i, v_j) f_j with trapezoid weights.
/// OpenMP over output points; the serial version is the reference.
GridFunction green_apply(const GridFunction& f);
GridFunction green_apply_serial(const GridFunction& f);

/// Trapezoid quadrature of G^2 over [0, L]^2 with n intervals per axis.
double hilbert_schmidt(double L, std::size_t n);

}  // namespace edwards::spectral
