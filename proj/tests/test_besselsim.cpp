#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "edwards/besselsim.hpp"
#include "edwards/errors.hpp"
#include "edwards/spectral.hpp"
#include "edwards/sturm.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

using namespace edwards;
using namespace edwards::besq;

namespace {

SimConfig config(std::size_t n, std::uint64_t seed, double dt = 1e-3) {
  SimConfig c;
  c.n_paths = n;
  c.seed = seed;
  c.dt = dt;
  return c;
}

McEstimate terminal_mean(const std::vector<PathFunctionalSample>& s) {
  std::vector<double> v;
  for (const auto& p : s) v.push_back(p.terminal);
  return mc::summarize(v, 0);
}

}  // namespace

TEST(SimConfig, Validation) {
  auto c = config(10, 1);
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = config(0, 1);
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_EQ(parse_scheme("exact_besq0"), Scheme::exact_besq0);
  EXPECT_EQ(to_string(Scheme::euler_abs), "euler_abs");
  EXPECT_THROW(parse_scheme("milstein"), DomainError);
}

TEST(SimulateBesq, Dim2Drift) {
  const auto s = simulate_besq(2, 1.0, 2.0, config(100000, 3));
  const auto m = terminal_mean(s);
  EXPECT_LE(std::abs(m.z(5.0)), 3.0) << m.mean << " +- " << m.se;
  for (const auto& p : s) {
    EXPECT_FALSE(p.absorbed());
    EXPECT_GE(p.additive, 0.0);
    EXPECT_GE(p.quad, 0.0);
  }
}

TEST(SimulateBesq, Dim2NeverAbsorbsFromPositiveStart) {
  const auto s = simulate_besq(2, 0.01, 5.0, config(2000, 4));
  for (const auto& p : s) EXPECT_FALSE(p.absorbed());
}

TEST(SimulateBesq, Dim0AbsorptionProbability) {
  for (auto scheme : {Scheme::euler_abs, Scheme::exact_besq0}) {
    auto c = config(100000, 5);
    c.scheme = scheme;
    const auto s = simulate_besq(0, 1.0, 0.5, c);
    std::vector<double> hit;
    for (const auto& p : s) hit.push_back(p.terminal == 0.0 ? 1.0 : 0.0);
    const auto e = mc::summarize(hit, 5);
    EXPECT_LE(std::abs(e.z(std::exp(-1.0))), 3.0) << to_string(scheme) << " " << e.mean << " +- " << e.se;
  }
}

TEST(SimulateBesq, Dim0AbsorbedPathsStayAtZero) {
  const auto s = simulate_besq(0, 0.5, 3.0, config(2000, 6));
  double last_quad = 0.0;
  for (const auto& p : s) {
    if (p.absorbed()) {
      EXPECT_EQ(p.terminal, 0.0);
      EXPECT_LE(p.absorbed_at, 3.0);
    }
    last_quad = std::max(last_quad, p.quad);
  }
  EXPECT_GT(last_quad, 0.0);
}

TEST(SimulateBesq, Dim0FromZero) {
  for (const auto& p : simulate_besq(0, 0.0, 1.0, config(100, 7))) {
    EXPECT_EQ(p.terminal, 0.0);
    EXPECT_EQ(p.additive, 0.0);
    EXPECT_EQ(p.quad, 0.0);
  }
  EXPECT_THROW(simulate_besq(1, 1.0, 1.0, config(10, 1)), DomainError);
  EXPECT_THROW(simulate_besq(0, -1.0, 1.0, config(10, 1)), DomainError);
}

TEST(SimulateBesq, FunctionalsGrowWithHorizon) {
  const auto short_run = simulate_besq(2, 1.0, 0.5, config(50, 8));
  const auto long_run = simulate_besq(2, 1.0, 1.0, config(50, 8));
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_LE(short_run[i].additive, long_run[i].additive);
    EXPECT_LE(short_run[i].quad, long_run[i].quad);
  }
}

TEST(EstimateY, FromZeroIsExactlyOne) {
  const auto e = estimate_y(1.0, 0.0, config(100, 1));
  EXPECT_EQ(e.mean, 1.0);
  EXPECT_EQ(e.se, 0.0);
}

TEST(EstimateY, MatchesClosedForm) {
  const auto y0 = estimate_y(0.0, 1.0, config(20000, 11));
  EXPECT_LE(std::abs(y0.z(spectral::y_kernel(0.0, 1.0))), 3.0) << y0.mean << " +- " << y0.se;
  const auto y2 = estimate_y(2.0, 0.5, config(20000, 12));
  EXPECT_LE(std::abs(y2.z(spectral::y_kernel(2.0, 0.5))), 3.0) << y2.mean << " +- " << y2.se;
  EXPECT_THROW(estimate_y(spectral::a_dstar(), 1.0, config(10, 1)), DomainError);
}

TEST(EstimateY, PlainEulerIsFirstOrder) {
  // coupled levels at dt, dt/2, dt/4; level differences estimate the bias steps
  auto c = config(100000, 21, 0.04);
  c.hybrid_besq0 = false;
  const auto lv = estimate_y_levels(0.0, 1.0, c, 3);
  ASSERT_EQ(lv.diff.size(), 2u);
  const double ratio = lv.diff[0].mean / lv.diff[1].mean;
  EXPECT_GT(std::abs(lv.diff[1].mean), 3.0 * lv.diff[1].se);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 3.0);
}

TEST(EstimateY, Deterministic) {
  const auto c = config(3000, 99);
  const auto a = estimate_y(1.0, 1.0, c), b = estimate_y(1.0, 1.0, c);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
  auto serial = c;
  serial.parallel = false;
  EXPECT_EQ(estimate_y(1.0, 1.0, serial).mean, a.mean);
}

TEST(EstimateW, MassAndDegenerateStart) {
  const std::vector<double> edges{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 40.0};
  const auto w = estimate_w(1.0, edges, config(20000, 31));
  EXPECT_LE(w.mass.mean, 1.0);
  EXPECT_LE(std::abs(w.mass.z(spectral::y_kernel(0.0, 1.0))), 3.0) << w.mass.mean << " +- " << w.mass.se;
  double total = 0.0;
  for (std::size_t i = 0; i < w.density.size(); ++i) total += w.density[i].mean * (edges[i + 1] - edges[i]);
  EXPECT_NEAR(total, w.binned_mass.mean, 1e-12);

  const auto zero = estimate_w(0.0, edges, config(100, 1));
  EXPECT_EQ(zero.density[0].mean * 0.5, 1.0);
  for (std::size_t i = 1; i < zero.density.size(); ++i) EXPECT_EQ(zero.density[i].mean, 0.0);
}

TEST(EstimateW, WeightedAverageConsistency) {
  // a = 0: y equals the total w mass, both from independent seeds
  const auto y = estimate_y(0.0, 1.0, config(20000, 41));
  const std::vector<double> edges{0.0, 1.0, 3.0, 40.0};
  const auto w = estimate_w(1.0, edges, config(20000, 42));
  const double z = (y.mean - w.mass.mean) / std::hypot(y.se, w.mass.se);
  EXPECT_LE(std::abs(z), 3.0);
}

TEST(Tilted, MartingaleAndStationarity) {
  const auto eig = sturm::principal_eigen(2.0);
  const auto s = simulate_tilted(eig, 1.0, 1.0, config(20000, 51));
  const auto w = s.weights();
  const auto m = mc::summarize(w, 51);
  EXPECT_LE(std::abs(m.z(1.0)), 3.0) << m.mean << " +- " << m.se;
  EXPECT_GT(s.ess, 200.0);

  const auto eq = simulate_tilted(eig, 0.0, 1.0, config(20000, 52), true);
  std::vector<double> xt;
  for (const auto& p : eq.paths) xt.push_back(p.xt);
  const auto mean_x = mc::weighted_mean(eq.weights(), xt, 52);
  const double target = eig.moment([](double h) { return h; });
  EXPECT_LE(std::abs(mean_x.z(target)), 3.0) << mean_x.mean << " +- " << mean_x.se << " vs " << target;
}

TEST(Tilted, EquilibriumSampler) {
  const auto eig = sturm::principal_eigen(0.0);
  EXPECT_EQ(sample_equilibrium(eig, 0.0), 0.0);
  std::vector<double> draws;
  for (int i = 0; i < 4000; ++i) draws.push_back(sample_equilibrium(eig, (i + 0.5) / 4000.0));
  double mean = 0.0;
  for (double d : draws) mean += d / draws.size();
  EXPECT_NEAR(mean, eig.moment([](double h) { return h; }), 1e-3);
}

TEST(Tilted, MixingDecorrelates) {
  const auto eig = sturm::principal_eigen(2.0);
  const auto c = mixing_correlation(eig, 5.0, 0.0, 1.0, config(20000, 61));
  EXPECT_LT(c.mean, 0.05);
  const auto early = mixing_correlation(eig, 0.1, 0.0, 1.0, config(5000, 62));
  EXPECT_GT(early.mean, 0.5);
}

TEST(FirstPassage, DensityProperties) {
  const double total = testutil::integrate([](double t) { return first_passage_density(1.0, t); }, 1e-6, 1.0, 400) +
                       first_passage_probability(1.0, 1.0, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(total, 1.0, 1e-8);
  EXPECT_NEAR(first_passage_probability(1.0, 0.0, std::numeric_limits<double>::infinity()), 1.0, 1e-14);
  EXPECT_NEAR(first_passage_probability(1.0, 0.2, 0.3), oracle::kFirstPassageBin, 1e-14);
  // mode at h^2 / 12
  const double d = 1e-7, t = 1.0 / 12.0;
  EXPECT_GT(first_passage_density(1.0, t), first_passage_density(1.0, t - 1e-6));
  EXPECT_GT(first_passage_density(1.0, t), first_passage_density(1.0, t + 1e-6));
  const double slope = (first_passage_density(1.0, t + d) - first_passage_density(1.0, t - d)) / (2.0 * d);
  EXPECT_NEAR(slope, 0.0, 1e-5);
  EXPECT_THROW(first_passage_density(0.0, 1.0), DomainError);
  EXPECT_THROW(first_passage_density(1.0, -1.0), DomainError);
}

TEST(FirstPassage, MonteCarloBin) {
  const auto e = first_passage_fraction(1.0, 0.2, 0.3, config(100000, 71));
  EXPECT_LE(std::abs(e.z(first_passage_probability(1.0, 0.2, 0.3))), 3.0) << e.mean << " +- " << e.se;
}
