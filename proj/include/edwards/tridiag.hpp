#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace edwards::tridiag {

/// Symmetric tridiagonal matrix: diag[i], off[i] couples rows i and i+1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;
  std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below lambda (Sturm sequence count).
std::size_t count_below(const SymTridiag& m, double lambda);

/// Largest eigenvalue by bisection on the Sturm count.
double largest_eigenvalue(const SymTridiag& m);

/// Eigenvector of the largest eigenvalue by inverse iteration with a shift
/// just above it. Returns the vector with unit Euclidean norm and the
/// Rayleigh quotient. A finite hint close to the top eigenvalue skips the
/// bisection; the result is verified by a Sturm count and the bisection is
/// used if the check fails.
struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};
EigenPair principal_pair(const SymTridiag& m, int iterations = 4,
                         double hint = std::numeric_limits<double>::quiet_NaN());

/// Solve a general tridiagonal system (Thomas algorithm). lower[i] couples
/// row i+1 to column i, upper[i] couples row i to column i+1.
void solve(std::span<const double> lower, std::span<const double> diag,
           std::span<const double> upper, std::span<double> rhs);

}  // namespace edwards::tridiag
