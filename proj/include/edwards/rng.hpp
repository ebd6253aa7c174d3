#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace edwards::rng {

/// Philox4x64-10 block function (counter-based; Salmon et al. constants).
inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr, std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += W0;
      key[1] += W1;
    }
    const unsigned __int128 p0 = static_cast<unsigned __int128>(M0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(M1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64), lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64), lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Independent stream keyed by (seed, stream id); the counter walks the
/// first word. Streams for different ids never overlap, so per-path
/// streams make results independent of how paths are split across workers.
class Stream {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  Stream(std::uint64_t seed, std::uint64_t id) : key_{seed, id} {}

  result_type operator()() {
    if (pos_ == 4) {
      block_ = philox4x64(ctr_, key_);
      ++ctr_[0];
      pos_ = 0;
    }
    return block_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  /// Standard normal by Box-Muller, caching the second variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double th = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  /// Gamma(shape, 1), Marsaglia-Tsang; shape < 1 by the u^{1/shape} boost.
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_pos(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Poisson(lambda): inversion for small lambda, otherwise the
  /// gamma/binomial splitting recursion.
  std::uint64_t poisson(double lambda) {
    std::uint64_t add = 0;
    while (lambda > 30.0) {
      // number of events before time m of a unit-rate process on [0, lambda]
      const auto m = static_cast<std::uint64_t>(0.875 * lambda);
      const double g = gamma(static_cast<double>(m));
      if (g > lambda) return add + binomial(m - 1, lambda / g);
      add += m;
      lambda -= g;
    }
    double p = std::exp(-lambda);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
    }
    return add + k;
  }

 private:
  std::uint64_t binomial(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) k += uniform() < p ? 1 : 0;
    return k;
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace edwards::rng
