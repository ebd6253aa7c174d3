#pragma once

#include <stdexcept>
#include <string>

namespace edwards {

/// Argument outside the mathematical domain of an operation (non-finite
/// input, a >= a** for the overshoot kernel, negative drift, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument inside the domain but outside the documented working range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Iterative solver failed to converge or to bracket a root.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-finite state, quadrature non-convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A truncated expansion was evaluated outside its accuracy contract.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double bound)
      : std::runtime_error(what), tail_bound(bound) {}
  double tail_bound;
};

/// Importance weights collapsed (effective sample size too small) or an
/// eigenvector lost its sign structure.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulated paths did not reach their stopping condition within the
/// allowed horizon.
class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edwards
