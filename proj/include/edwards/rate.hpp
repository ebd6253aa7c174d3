#pragma once

#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "edwards/constants.hpp"
#include "edwards/sturm.hpp"

namespace edwards::rate {

enum class MgfBranch { flat, convex };
enum class RateBranch { linear, convex };

std::string to_string(MgfBranch b);
std::string to_string(RateBranch b);

struct MgfPoint {
  double mu = 0.0;
  double value = 0.0;  ///< Lambda+(mu)
  MgfBranch branch = MgfBranch::flat;
  double a = 0.0;      ///< rho^{-1}(-mu) on the convex branch, a** on the flat one
};

struct RatePoint {
  double b = 0.0;
  double value = 0.0;       ///< I(b)
  double derivative = 0.0;  ///< I'(b)
  RateBranch branch = RateBranch::linear;
  double a_b = 0.0;         ///< solution of rho'(a_b) = 1/b (a** on the linear branch)
};

struct RateCurve {
  std::vector<RatePoint> points;
  constants::ModelConstants constants;
};

struct MgfCurve {
  std::vector<MgfPoint> points;
  constants::ModelConstants constants;
};

struct LegendreRow {
  double b = 0.0;
  double rate = 0.0;       ///< branch-formula I(b)
  double legendre = 0.0;   ///< max_mu b mu - Lambda+(mu)
  double gap = 0.0;
  double argmax = 0.0;
  double expected_argmax = 0.0;  ///< -rho(a_b), or -rho(a**) on the linear branch
};

struct LegendreReport {
  std::vector<LegendreRow> rows;
  double max_gap = 0.0;
};

struct InvolutionReport {
  double max_error = 0.0;  ///< max |Lambda+** - Lambda+| over the checked mu
  double worst_mu = 0.0;
  std::size_t samples = 0; ///< number of parametric Lambda+ samples
};

/// Discrete convex conjugate f*(s) = max_i (s x_i - f_i), refined by the
/// vertex of the parabola through the best sample and its neighbours.
double discrete_conjugate(std::span<const double> x, std::span<const double> f, double s);

/// Rate function, moment generating function and their duality, built on
/// rho and rho' from the eigen solver. Eigen evaluations are memoized per a;
/// the memo is guarded by a mutex so concurrent calls are safe.
class RateModel {
 public:
  explicit RateModel(const sturm::SolverConfig& cfg = {});
  RateModel(const sturm::SolverConfig& cfg, const constants::ModelConstants& c);

  const constants::ModelConstants& constants() const { return c_; }
  const sturm::SolverConfig& config() const { return cfg_; }

  double rho(double a) const;
  double rho1(double a) const;

  MgfPoint lambda_plus(double mu) const;
  /// Lambda(mu) = Lambda+(|mu|).
  double lambda_full(double mu) const;
  /// b >= 0. Switches to the linear formula within 1e-6 of b**.
  RatePoint rate_I(double b) const;
  /// beta^{2/3} I(beta^{-1/3} |b|).
  double beta_scale(double beta, double b) const;

  /// For each b the golden-section refined maximum of b mu - Lambda+(mu)
  /// around the best mu_grid point, compared with rate_I(b).
  LegendreReport legendre_check(std::span<const double> b_grid, std::span<const double> mu_grid) const;

  /// Samples Lambda+ parametrically (mu = -rho(a), value = -a) on an a-grid
  /// with mu spacing dmu, transforms twice and compares with lambda_plus on
  /// [mu_lo, mu_hi].
  InvolutionReport involution_check(double mu_lo, double mu_hi, double dmu = 0.02) const;

  /// Rows b = bmin + k step; negative b by symmetry. beta rescales.
  RateCurve rate_curve(double bmin, double bmax, double step, double beta = 1.0) const;
  MgfCurve mgf_curve(double mumin, double mumax, double step) const;

 private:
  struct Eval {
    double rho;
    double rho1;
  };
  Eval eval(double a) const;

  sturm::SolverConfig cfg_;
  constants::ModelConstants c_;
  mutable std::mutex mu_;
  mutable std::map<double, Eval> memo_;
};

/// Number of grid rows for [lo, hi] with the given step (inclusive ends).
std::size_t grid_count(double lo, double hi, double step);

}  // namespace edwards::rate
