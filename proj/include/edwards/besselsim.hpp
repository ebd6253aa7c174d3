#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "edwards/mc.hpp"
#include "edwards/rng.hpp"
#include "edwards/sturm.hpp"

namespace edwards::besq {

using mc::McEstimate;

enum class Scheme { euler_abs, exact_besq0 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SimConfig {
  double dt = 1e-3;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::euler_abs;
  std::size_t max_steps = 10000;  ///< per-path cap for run-to-absorption loops
  bool parallel = true;           ///< false runs the same per-path code serially
  /// BESQ^0 stepping: exact Poisson-Gamma transition below 40 dt, moment
  /// matched quadratic step above. false selects plain Euler with full
  /// truncation everywhere (first-order absorption bias).
  bool hybrid_besq0 = true;

  void validate() const;
};

struct PathFunctionalSample {
  double terminal = 0.0;
  double additive = 0.0;  ///< int_0^t X dv
  double quad = 0.0;      ///< int_0^t X^2 dv
  double absorbed_at = std::numeric_limits<double>::infinity();  ///< +inf when not absorbed

  bool absorbed() const { return absorbed_at != std::numeric_limits<double>::infinity(); }
};

/// n_paths samples of BESQ^dim (dim 0 or 2) from h0 up to t_end. dim 2:
/// Euler with full truncation, clamped at 0. dim 0: see
/// SimConfig::hybrid_besq0; absorbed at the first step that lands on or
/// below 0 (Euler crossings linearly interpolated, otherwise the step end). With
/// Scheme::exact_besq0 and dim 0 only the terminal value is sampled, from
/// the exact transition; additive and quad are NaN and absorbed_at is NaN
/// for paths found at 0.
std::vector<PathFunctionalSample> simulate_besq(int dim, double h0, double t_end, const SimConfig& cfg);

/// One hybrid BESQ^0 step of length h from x > 0 (exact transition near 0,
/// moment-matched quadratic step elsewhere). Returns 0 on absorption.
double besq0_step(double x, double h, rng::Stream& s);

/// One BESQ^2 Euler step with full truncation, clamped at 0; z standard normal.
inline double besq2_step(double x, double h, double z) {
  const double next = x + 2.0 * h + 2.0 * std::sqrt(std::max(x, 0.0) * h) * z;
  return next > 0.0 ? next : 0.0;
}

/// y_a(h0) = E*_h0 exp(int (a X - X^2) dv) from BESQ^0 run to absorption.
McEstimate estimate_y(double a, double h0, const SimConfig& cfg);

/// The same estimator at dt, dt/2, ..., dt/2^(levels-1) on shared Brownian
/// increments. diff[k] = level[k] - level[k+1] with paired standard errors.
struct CoupledLevels {
  std::vector<double> dts;
  std::vector<McEstimate> level;
  std::vector<McEstimate> diff;
};
CoupledLevels estimate_y_levels(double a, double h0, const SimConfig& cfg, int levels = 3);

struct WHistogram {
  std::vector<double> edges;
  std::vector<McEstimate> density;  ///< weighted frequency / width, per bin
  McEstimate mass;                  ///< E* exp(-int X^2) over all outcomes
  McEstimate binned_mass;           ///< same, restricted to the bins
};

/// Density of A*(inf) under the weight exp(-int X^2), binned. A path with
/// h0 = 0 has A*(inf) = 0 and lands in a bin whose left edge is 0.
WHistogram estimate_w(double h0, std::span<const double> edges, const SimConfig& cfg);

struct TiltedPath {
  double x0 = 0.0;
  double xt = 0.0;
  double log_weight = 0.0;  ///< log D_t
};

struct TiltedSample {
  std::vector<TiltedPath> paths;
  double ess = 0.0;
  std::vector<double> weights() const;
};

/// BESQ^2 paths carrying the density D_t = x_a(X_t)/x_a(X_0)
/// exp(int (a X - X^2 - rho) dv). With equilibrium set, X_0 is drawn from
/// x_a(h)^2 dh and h0 is ignored. Throws DegeneracyError when the effective
/// sample size drops below 1% of n_paths.
TiltedSample simulate_tilted(const sturm::EigenSolution& eig, double h0, double t_end, const SimConfig& cfg,
                             bool equilibrium = false);

/// Inverse-CDF draw from x_a(h)^2 dh on the solver grid, u in [0, 1).
double sample_equilibrium(const sturm::EigenSolution& eig, double u);

/// Weighted correlation of 1{X_0 in [lo,hi]} and 1{X_s in [lo,hi]} under the
/// tilted equilibrium law.
McEstimate mixing_correlation(const sturm::EigenSolution& eig, double s, double lo, double hi,
                              const SimConfig& cfg);

/// phi_h(t) = (8 pi)^{-1/2} t^{-3/2} h exp(-h^2 / 8t): density of the first
/// zero of a Brownian motion started at h/2.
double first_passage_density(double h, double t);

/// int_{t_lo}^{t_hi} phi_h.
double first_passage_probability(double h, double t_lo, double t_hi);

/// Fraction of Brownian paths from h/2 first hitting 0 within [t_lo, t_hi],
/// with the Brownian-bridge crossing correction inside each step.
McEstimate first_passage_fraction(double h, double t_lo, double t_hi, const SimConfig& cfg);

/// One line of the oracle suite.
struct OracleCheck {
  std::string check;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
};

/// Suites: "absorption", "y", "w", "tilted". n_paths of cfg is the base
/// sample count; the w bin check uses ten times as many.
std::vector<OracleCheck> validation_suite(const std::string& suite, const SimConfig& cfg);

}  // namespace edwards::besq
