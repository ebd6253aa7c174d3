#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace edwards::sturm {

/// Discretization settings for the principal eigenproblem of
///   (K^a x)(h) = 2h x''(h) + 2x'(h) + (a h - h^2) x(h),  h >= 0.
struct SolverConfig {
  std::size_t n = 1024;       ///< grid intervals at the coarsest Richardson level
  double h_max = 0.0;         ///< truncation point; <= 0 selects it automatically
  int refine_levels = 3;      ///< grids n, 2n, 4n, ... used for extrapolation
  double tol = 1e-10;         ///< target agreement of successive extrapolants, relative to max(1, |rho|)

  void validate() const;
};

/// Nodes 0 = h_0 < ... < h_N = h_max, uniform in s = sqrt(h), with the
/// finite-volume faces h_{i+1/2} taken at the mapped s-midpoints.
struct Grid {
  std::vector<double> nodes;  ///< N + 1 nodes, the last one carries the Dirichlet value
  std::vector<double> faces;  ///< N faces, faces[i] lies between nodes[i] and nodes[i+1]

  static Grid sqrt_uniform(double h_max, std::size_t intervals);
  std::size_t intervals() const { return faces.size(); }
  /// Control-volume width of node i (i < N).
  double volume(std::size_t i) const { return faces[i] - (i == 0 ? 0.0 : faces[i - 1]); }
};

/// Principal eigenpair (rho(a), x_a) with solver metadata.
struct EigenSolution {
  double a = 0.0;
  double rho = 0.0;           ///< Richardson-extrapolated principal eigenvalue
  double rho1 = 0.0;          ///< extrapolated d rho / d a = int h x_a^2 dh
  std::vector<double> grid;   ///< finest-level nodes, grid.back() == h_max
  std::vector<double> xvals;  ///< x_a on the grid, positive in the interior, x(h_max) = 0
  double h_max = 0.0;
  std::size_t n = 0;          ///< finest-level interval count
  double achieved_tol = 0.0;  ///< |difference of the last two extrapolants|
  std::vector<double> level_rho;  ///< raw discrete eigenvalue per level

  /// x_a(h) by 4-point Lagrange interpolation of log x on the grid; beyond
  /// the point where the Dirichlet cap distorts the tail the log is
  /// continued with slope -sqrt(2 h).
  double eval(double h) const;
  double log_eval(double h) const;

  /// Grid L2 norm of K^a x - rho x at interior nodes relative to ||x||,
  /// using the conservative stencil.
  double residual() const;

  /// int_0^inf f(h) x_a(h)^2 dh by the finite-volume quadrature.
  template <typename F>
  double moment(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      s += f(grid[i]) * xvals[i] * xvals[i] * volume_[i];
    }
    return s;
  }

  std::vector<double> volume_;  ///< finite-volume weights on the finest grid
  std::size_t tail_index_ = 0;  ///< last node trusted for log interpolation
};

/// Discrete principal eigenpair on a fixed grid: largest eigenvalue of the
/// symmetric generalized problem A x = rho M x, by Sturm-count bisection
/// followed by shifted inverse iteration. A finite hint (an estimate of the
/// eigenvalue, e.g. from a coarser grid) replaces the bisection.
struct DiscreteEigen {
  double rho = 0.0;
  double rho1 = 0.0;  ///< discrete Hellmann-Feynman derivative
  std::vector<double> x;
};
DiscreteEigen discrete_principal(double a, const Grid& grid,
                                 double hint = std::numeric_limits<double>::quiet_NaN());

/// Auto truncation point for parameter a (WKB decay of x_a below
/// exp(-exponent)).
double auto_h_max(double a, double exponent);

EigenSolution principal_eigen(double a, const SolverConfig& cfg = {});

struct RhoDerivatives {
  double rho1 = 0.0;
  double rho2 = 0.0;
};

/// rho'(a) from int h x_a^2 dh and rho''(a) from a central difference of
/// rho' with adaptively halved step.
RhoDerivatives rho_derivative(double a, const SolverConfig& cfg = {});

/// Explicit trial-function lower bound
///   -sqrt(2) (-a)^{1/2} - (-a)^{-1} int h^2 y*(h)^2 dh = -sqrt(2) (-a)^{1/2} - 1/(-a),
/// with the unit-norm maximizer y*(h) = 2^{1/4} e^{-h/sqrt 2} of the scaled
/// problem. Valid for a < 0; throws DomainError for a >= 0.
double rayleigh_lower_bound(double a);

}  // namespace edwards::sturm
