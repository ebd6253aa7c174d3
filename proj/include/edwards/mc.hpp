#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

namespace edwards::mc {

/// Monte Carlo point estimate with its standard error.
struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;  ///< effective number of samples
  std::uint64_t seed = 0;

  double z(double target) const {
    if (se > 0.0) return (mean - target) / se;
    return mean == target ? 0.0 : std::copysign(INFINITY, mean - target);
  }
};

/// Sum in a fixed binary-tree order; the result depends only on the
/// sequence, not on how it was produced.
double pairwise_sum(std::span<const double> v);

/// Mean and standard error of i.i.d. samples (pairwise reductions).
McEstimate summarize(std::span<const double> v, std::uint64_t seed);

/// Self-normalized weighted mean of f with delta-method standard error;
/// n reports the effective sample size.
McEstimate weighted_mean(std::span<const double> w, std::span<const double> f, std::uint64_t seed);

/// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> w);

/// Runs body(i) for i in [0, n), across OpenMP threads when parallel is set.
/// Bodies must write only to slot i of their outputs. An exception from any
/// path is rethrown after the loop (the one from the lowest index).
template <class Body>
void for_paths(std::size_t n, bool parallel, Body&& body) {
  const auto count = static_cast<long long>(n);
  std::exception_ptr first;
  long long first_index = count;
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(edwards_for_paths)
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace edwards::mc
