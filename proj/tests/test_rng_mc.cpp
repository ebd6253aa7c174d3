#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "edwards/mc.hpp"
#include "edwards/rng.hpp"
#include "oracle_values.hpp"

using namespace edwards;

TEST(Philox, KnownAnswerZero) {
  const auto out = rng::philox4x64({0, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(out[i], oracle::kPhiloxZero[i]) << i;
}

TEST(Philox, StreamsDifferAndRepeat) {
  rng::Stream a(7, 0), b(7, 1), c(7, 0), d(8, 0);
  int same_ab = 0, same_ad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c(), w = d();
    EXPECT_EQ(x, z);
    same_ab += x == y;
    same_ad += x == w;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ad, 0);
}

TEST(Philox, UniformRanges) {
  rng::Stream s(1, 2);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform(), v = s.uniform_pos();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Philox, DistributionMoments) {
  // fixed seed; tolerances are about 5 standard errors
  const int n = 200000;
  rng::Stream s(12345, 0);
  std::vector<double> normal(n), gam(n), small_gam(n), pois(n), big_pois(n);
  for (int i = 0; i < n; ++i) {
    normal[i] = s.normal();
    gam[i] = s.gamma(2.5);
    small_gam[i] = s.gamma(0.3);
    pois[i] = static_cast<double>(s.poisson(3.0));
    big_pois[i] = static_cast<double>(s.poisson(120.0));
  }
  auto est = [](const std::vector<double>& v) { return mc::summarize(v, 0); };
  auto var = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    return s2 / (v.size() - 1);
  };
  EXPECT_LT(std::abs(est(normal).z(0.0)), 5.0);
  EXPECT_NEAR(var(normal), 1.0, 0.02);
  EXPECT_LT(std::abs(est(gam).z(2.5)), 5.0);
  EXPECT_NEAR(var(gam), 2.5, 0.06);
  EXPECT_LT(std::abs(est(small_gam).z(0.3)), 5.0);
  EXPECT_LT(std::abs(est(pois).z(3.0)), 5.0);
  EXPECT_NEAR(var(pois), 3.0, 0.08);
  EXPECT_LT(std::abs(est(big_pois).z(120.0)), 5.0);
  EXPECT_NEAR(var(big_pois) / 120.0, 1.0, 0.03);
}

TEST(McReductions, PairwiseSum) {
  EXPECT_EQ(mc::pairwise_sum({}), 0.0);
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(mc::pairwise_sum(v), 500500.0);
  std::vector<double> tiny(1 << 20, 0.1);
  EXPECT_NEAR(mc::pairwise_sum(tiny), 0.1 * tiny.size(), 1e-9);
}

TEST(McReductions, Summarize) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto e = mc::summarize(v, 9);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.n, 4u);
  EXPECT_EQ(e.seed, 9u);
  EXPECT_NEAR(e.z(2.0), 0.5 / e.se, 1e-15);
  mc::McEstimate exact{1.0, 0.0, 1, 0};
  EXPECT_EQ(exact.z(1.0), 0.0);
  EXPECT_TRUE(std::isinf(exact.z(0.0)));
}

TEST(McReductions, WeightedMean) {
  const std::vector<double> w{1.0, 1.0, 1.0, 1.0}, f{1.0, 2.0, 3.0, 4.0};
  const auto e = mc::weighted_mean(w, f, 0);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_EQ(e.n, 4u);
  const std::vector<double> w2{3.0, 1.0}, f2{0.0, 4.0};
  EXPECT_DOUBLE_EQ(mc::weighted_mean(w2, f2, 0).mean, 1.0);
  EXPECT_DOUBLE_EQ(mc::effective_sample_size(w2), 16.0 / 10.0);
}

TEST(ForPaths, RethrowsLowestIndex) {
  std::vector<int> done(1000, 0);
  try {
    mc::for_paths(1000, true, [&](std::size_t i) {
      if (i == 300 || i == 700) throw std::runtime_error("path " + std::to_string(i));
      done[i] = 1;
    });
    FAIL() << "no exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "path 300");
  }
  EXPECT_EQ(done[299], 1);
}

TEST(ForPaths, ParallelBitIdenticalToSerial) {
  const std::size_t n = 5000;
  auto run = [&](bool par) {
    std::vector<double> out(n);
    mc::for_paths(n, par, [&](std::size_t i) {
      rng::Stream s(42, i);
      double acc = 0.0;
      for (int k = 0; k < 50; ++k) acc += s.normal() * s.gamma(0.7);
      out[i] = acc;
    });
    return mc::summarize(out, 42);
  };
  const auto a = run(false), b = run(true);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
}
