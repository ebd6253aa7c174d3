#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "edwards/mc.hpp"

namespace edwards::polymer {

using mc::McEstimate;

struct PolymerConfig {
  double T = 4.0;
  double beta = 1.0;
  double dt = 0.0025;
  double bin = 0.05;
  std::size_t n_paths = 20000;
  std::uint64_t seed = 1;
  /// Importance sampling drift: paths are drawn with drift +drift or -drift
  /// (probability 1/2 each) and reweighted back to Wiener measure. Negative
  /// selects 1.1 beta^{1/3}; 0 samples plain Brownian paths.
  double drift = -1.0;
  bool parallel = true;

  void validate() const;
  double effective_drift() const;
  std::size_t steps() const;
};

/// Occupation time per spatial bin; bin index k covers [k bin, (k+1) bin).
struct LocalTimeHistogram {
  double bin = 0.0;
  std::map<long, double> bins;

  double total() const;
  /// sum over bins of (occupation / bin)^2 * bin.
  double intersection() const;
};

/// Each step [t_k, t_{k+1}] deposits dt into the bin holding the step midpoint.
LocalTimeHistogram local_times(std::span<const double> path, double dt, double bin);

struct PolymerEstimate {
  double logZ = 0.0, logZ_se = 0.0;
  double rate_at_T = 0.0, rate_se = 0.0;              ///< -logZ / T
  double endpoint_mean = 0.0, endpoint_mean_se = 0.0;  ///< E_Q |B_T| / T
  double endpoint_sd = 0.0, endpoint_sd_se = 0.0;      ///< sd_Q(|B_T|) / sqrt(T)
  double signed_mean = 0.0, signed_mean_se = 0.0;      ///< E_Q B_T / T
  double skewness = 0.0, skewness_se = 0.0;            ///< of B_T under Q
  double mean_H = 0.0, mean_H_se = 0.0;                ///< E H_T under Wiener measure
  double ess = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Raw per-path output of the polymer sampler.
struct PolymerPaths {
  std::vector<double> endpoint;     ///< B_T
  std::vector<double> H;            ///< binned intersection local time
  std::vector<double> log_lr;       ///< log dWiener/dProposal at the path
  std::vector<double> log_weight;   ///< -beta H + log_lr
};

PolymerPaths sample_paths(const PolymerConfig& cfg);

/// Z_T^beta = E exp(-beta H_T) and endpoint statistics of the polymer
/// measure. Throws DegeneracyError when the effective sample size is below
/// 0.1% of n_paths.
PolymerEstimate sample_polymer(const PolymerConfig& cfg);

/// (1/T) log E[exp(-beta H_T + mu B_T) 1{B_T >= 0}].
McEstimate tilted_mgf(double mu, const PolymerConfig& cfg);

struct CollapseRow {
  double beta = 0.0;
  double T = 0.0;
  double logZ = 0.0, logZ_se = 0.0, z_logZ = 0.0;
  double endpoint = 0.0, endpoint_se = 0.0, z_endpoint = 0.0;  ///< E|B_T|/T scaled by beta^{-1/3}
};

struct CollapseReport {
  double reference_T = 0.0;  ///< horizon of the beta = 1 run; beta runs use reference_T beta^{-2/3}
  std::vector<CollapseRow> rows;
  double max_abs_z = 0.0;
  double exponent = 0.0;  ///< least-squares slope of log(-logZ/T) against log beta; NaN with < 2 betas
};

/// Runs each beta at horizon cfg.T beta^{-2/3}, step cfg.dt beta^{-2/3} and
/// bin cfg.bin beta^{-1/3}, which makes the discretized law an exact
/// rescaling of the beta = 1 run at cfg.T, and reports z-scores against it.
CollapseReport scaling_collapse(std::span<const double> betas, const PolymerConfig& cfg);

/// Linear fit y = c0 + c1 / T; c0 is the extrapolated T -> infinity value.
struct InverseTFit {
  double c0 = 0.0, c0_se = 0.0, c1 = 0.0;
};
InverseTFit extrapolate_inverse_T(std::span<const double> Ts, std::span<const double> values,
                                  std::span<const double> ses);

struct RayKnightReport {
  double a = 0.0;
  // direct paths versus the three-piece composite
  double direct_mean = 0.0, direct_mean_se = 0.0;
  double composite_mean = 0.0, composite_mean_se = 0.0;
  double z_mean = 0.0;
  double direct_var = 0.0, direct_var_se = 0.0;
  double composite_var = 0.0, composite_var_se = 0.0;
  double z_var = 0.0;
  double acceptance = 0.0;  ///< fraction of composite proposals accepted
  std::size_t matched = 0;  ///< direct paths with an accepted composite
  double swap_z = 0.0;      ///< max |z| on mean and variance after exchanging the two BESQ0 pieces
  // e^{aT} E[e^{-H_T - rho(a) B_T} 1{B_T >= 0}] both ways
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  double z_bookkeeping = 0.0;
};

/// Desk-scale check of the Ray-Knight representation of H_T at the horizon
/// cfg.T. For each direct path with B_T >= 0 (paths with B_T < 0 are
/// reflected) the composite takes a BESQ0 piece from L(T, B_T) with total
/// area near the area beyond B_T, a BESQ2 piece from L(T, B_T) over [0, B_T]
/// with area and endpoint near the middle data, and a BESQ0 piece from
/// L(T, 0) with area near the area left of 0. Acceptance windows are
/// +-window_rel relative (with absolute floors). The bookkeeping identity
/// compares the weighted left side against the (t1, t2)-integrated tilted
/// estimate, which carries the Jacobian 1/Y_s of the endpoint change of
/// variable y -> s = A(y). Throws DegeneracyError when acceptance falls below 1e-4.
RayKnightReport rayknight_consistency(double a, const PolymerConfig& cfg, double window_rel = 0.08);

}  // namespace edwards::polymer
