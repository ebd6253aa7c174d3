#include "edwards/mc.hpp"

#include <algorithm>

namespace edwards::mc {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

McEstimate summarize(std::span<const double> v, std::uint64_t seed) {
  McEstimate e;
  e.n = v.size();
  e.seed = seed;
  if (v.empty()) return e;
  const double n = static_cast<double>(v.size());
  e.mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
  if (v.size() > 1) e.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

McEstimate weighted_mean(std::span<const double> w, std::span<const double> f, std::uint64_t seed) {
  McEstimate e;
  e.seed = seed;
  const double sw = pairwise_sum(w);
  if (!(sw > 0.0)) return e;
  std::vector<double> wf(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) wf[i] = w[i] * f[i];
  e.mean = pairwise_sum(wf) / sw;
  std::vector<double> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w[i] * (f[i] - e.mean);
    r[i] = d * d;
  }
  e.se = std::sqrt(pairwise_sum(r)) / sw;
  e.n = static_cast<std::size_t>(effective_sample_size(w));
  return e;
}

double effective_sample_size(std::span<const double> w) {
  const double s = pairwise_sum(w);
  std::vector<double> sq(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sq[i] = w[i] * w[i];
  const double s2 = pairwise_sum(sq);
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace edwards::mc
