#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "edwards/errors.hpp"
#include "edwards/rate.hpp"
#include "test_util.hpp"

using namespace edwards;

namespace {
const rate::RateModel& model() {
  static const rate::RateModel m;
  return m;
}
}  // namespace

TEST(LambdaPlus, Examples) {
  const auto& m = model();
  const auto& c = m.constants();
  const auto zero = m.lambda_plus(0.0);
  EXPECT_NEAR(zero.value, -c.a_star, 1e-9);
  EXPECT_NEAR(zero.value, -2.19, 0.01);
  EXPECT_EQ(zero.branch, rate::MgfBranch::convex);

  const auto flat = m.lambda_plus(-c.rho_a_dstar - 1.0);
  EXPECT_EQ(flat.branch, rate::MgfBranch::flat);
  EXPECT_EQ(flat.value, -c.a_dstar);

  const double g50 = std::abs(m.lambda_plus(50.0).value - 1250.0);
  const double g40 = std::abs(m.lambda_plus(40.0).value - 800.0);
  EXPECT_LE(g50, 1.0);
  EXPECT_LT(g50, g40);
}

TEST(LambdaPlus, BranchBoundary) {
  const auto& m = model();
  const double edge = -m.constants().rho_a_dstar;
  EXPECT_EQ(m.lambda_plus(edge).branch, rate::MgfBranch::flat);
  const auto just = m.lambda_plus(edge + 1e-3);
  EXPECT_EQ(just.branch, rate::MgfBranch::convex);
  EXPECT_NEAR(just.value, -m.constants().a_dstar, 2e-3);
  EXPECT_GT(just.value, -m.constants().a_dstar);
}

TEST(LambdaFull, SymmetryAndKink) {
  const auto& m = model();
  const auto& c = m.constants();
  for (double mu : {0.3, 1.0, 2.0}) EXPECT_EQ(m.lambda_full(mu), m.lambda_full(-mu));
  EXPECT_NEAR(m.lambda_full(0.0), -c.a_star, 1e-9);
  const double step = 1e-4;
  const double slope = (m.lambda_full(step) - m.lambda_full(0.0)) / step;
  EXPECT_NEAR(slope, c.b_star, 5e-3);
  EXPECT_NEAR(slope, 1.11, 0.01);
}

TEST(RateI, Examples) {
  const auto& m = model();
  const auto& c = m.constants();
  const auto at_min = m.rate_I(c.b_star);
  EXPECT_NEAR(at_min.value, c.a_star, 1e-8);
  EXPECT_NEAR(at_min.derivative, 0.0, 1e-8);
  EXPECT_EQ(at_min.branch, rate::RateBranch::convex);

  const auto zero = m.rate_I(0.0);
  EXPECT_EQ(zero.branch, rate::RateBranch::linear);
  EXPECT_NEAR(zero.value, c.a_dstar, 1e-12);
  EXPECT_NEAR(zero.derivative, -c.rho_a_dstar, 1e-12);
  EXPECT_NEAR(zero.derivative, -0.78, 0.01);

  EXPECT_NEAR(m.rate_I(10.0).value, 50.0, 0.2);
  EXPECT_THROW(m.rate_I(-1.0), DomainError);
}

TEST(RateI, LinearBranchFormula) {
  const auto& m = model();
  const auto& c = m.constants();
  for (double b : {0.1, 0.4, 0.7, c.b_dstar}) {
    const auto p = m.rate_I(b);
    EXPECT_EQ(p.branch, rate::RateBranch::linear) << b;
    EXPECT_NEAR(p.value, -b * c.rho_a_dstar + c.a_dstar, 1e-12);
    EXPECT_EQ(p.derivative, -c.rho_a_dstar);
  }
  EXPECT_EQ(m.rate_I(c.b_dstar + 1e-7).branch, rate::RateBranch::linear);
  EXPECT_EQ(m.rate_I(c.b_dstar + 1e-3).branch, rate::RateBranch::convex);
}

TEST(RateI, ContinuousAndC1AtDoubleStar) {
  const auto& m = model();
  const auto& c = m.constants();
  const double bd = c.b_dstar;
  const auto left = m.rate_I(bd);
  // right-hand values approach with slope -rho(a_b); extrapolate linearly to b**
  const auto r1 = m.rate_I(bd + 1e-3), r2 = m.rate_I(bd + 2e-3);
  const double value_limit = 2.0 * r1.value - r2.value;
  const double slope_limit = 2.0 * r1.derivative - r2.derivative;
  EXPECT_NEAR(value_limit, left.value, 1e-5);
  EXPECT_NEAR(slope_limit, left.derivative, 1e-4);
  EXPECT_NEAR(r1.value, left.value, 1e-3);
}

TEST(RateI, SecondDerivativeAtMinimum) {
  const auto& m = model();
  const auto& c = m.constants();
  const double d = 1e-3;
  const double second = (m.rate_I(c.b_star + d).value - 2.0 * m.rate_I(c.b_star).value + m.rate_I(c.b_star - d).value) / (d * d);
  EXPECT_NEAR(second * c.c_star * c.c_star, 1.0, 0.02);
}

TEST(RateI, Convexity) {
  const auto& m = model();
  const double bdd = m.constants().b_dstar;
  std::vector<double> bs, vs;
  for (int i = 0; i <= 80; ++i) {
    bs.push_back(0.05 * i);
    vs.push_back(m.rate_I(bs.back()).value);
  }
  for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
    const double dd = vs[i + 1] - 2.0 * vs[i] + vs[i - 1];
    EXPECT_GE(dd, -1e-12) << bs[i];
    if (bs[i - 1] > bdd + 0.05) EXPECT_GT(dd, 0.0) << bs[i];
  }
}

TEST(RateI, UniqueZeroOfDerivative) {
  const auto& m = model();
  int changes = 0;
  double prev = m.rate_I(0.86).derivative, where = 0.0;
  for (double b = 0.87; b <= 4.0 + 1e-12; b += 0.01) {
    const double d = m.rate_I(b).derivative;
    if ((d > 0.0) != (prev > 0.0)) {
      ++changes;
      where = b;
    }
    prev = d;
  }
  EXPECT_EQ(changes, 1);
  EXPECT_NEAR(where, m.constants().b_star, 0.011);
}

TEST(RateI, QuadraticTail) {
  const auto& m = model();
  std::vector<double> scaled;
  for (double b : {5.0, 10.0, 20.0}) {
    // I(b) = b^2/2 + 2/b + o(1/b), from rho(a) = -sqrt(2|a|) - 1/|a| + ...
    const double gap = m.rate_I(b).value - b * b / 2.0;
    EXPECT_GT(gap, 0.0) << b;
    scaled.push_back(b * gap);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LE(*hi / *lo, 3.0);
  EXPECT_NEAR(scaled.back(), 2.0, 0.01);
}

TEST(Legendre, GapAndArgmax) {
  const auto& m = model();
  const auto& c = m.constants();
  const std::vector<double> bs{0.0, 0.5, c.b_dstar, 1.0, c.b_star, 2.0, 3.0};
  std::vector<double> mus;
  for (double mu = -3.0; mu <= 6.0 + 1e-12; mu += 0.05) mus.push_back(mu);
  const auto rep = m.legendre_check(bs, mus);
  ASSERT_EQ(rep.rows.size(), bs.size());
  EXPECT_LE(rep.max_gap, 1e-5);
  EXPECT_NEAR(rep.rows[1].argmax, -c.rho_a_dstar, 1e-4);
  for (const auto& r : rep.rows) {
    if (r.b > c.b_dstar + 1e-6) EXPECT_NEAR(r.argmax, r.expected_argmax, 1e-3) << r.b;
  }
}

TEST(Legendre, Involution) {
  const auto& m = model();
  const auto rep = m.involution_check(-m.constants().rho_a_dstar + 0.1, 5.0);
  EXPECT_GT(rep.samples, 100u);
  EXPECT_LE(rep.max_error, 1e-5) << "worst at mu = " << rep.worst_mu;
}

TEST(Legendre, DiscreteConjugateOfParabola) {
  std::vector<double> x, f;
  for (int i = -200; i <= 200; ++i) {
    x.push_back(0.05 * i);
    f.push_back(0.5 * x.back() * x.back());
  }
  for (double s : {-2.0, 0.0, 0.33, 3.7}) EXPECT_NEAR(rate::discrete_conjugate(x, f, s), 0.5 * s * s, 1e-12);
}

TEST(BetaScale, Rescaling) {
  const auto& m = model();
  const auto& c = m.constants();
  for (double b : {0.0, 0.5, 1.5, 3.0}) EXPECT_EQ(m.beta_scale(1.0, b), m.rate_I(b).value);
  EXPECT_NEAR(m.beta_scale(8.0, 2.0 * c.b_star), 4.0 * c.a_star, 1e-8);
  EXPECT_EQ(m.beta_scale(2.0, -1.3), m.beta_scale(2.0, 1.3));
  // minimizer at beta^{1/3} b*
  const double beta = 3.0, d = 1e-3, bm = std::cbrt(beta) * c.b_star;
  EXPECT_LT(m.beta_scale(beta, bm), m.beta_scale(beta, bm - d));
  EXPECT_LT(m.beta_scale(beta, bm), m.beta_scale(beta, bm + d));
  EXPECT_THROW(m.beta_scale(0.0, 1.0), DomainError);
  EXPECT_THROW(m.beta_scale(-1.0, 1.0), DomainError);
}

TEST(Curves, RateCurveRowsAndBranches) {
  const auto& m = model();
  const auto curve = m.rate_curve(0.0, 3.0, 0.01);
  ASSERT_EQ(curve.points.size(), 301u);
  int flips = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    EXPECT_GT(curve.points[i].b, curve.points[i - 1].b);
    if (curve.points[i].branch != curve.points[i - 1].branch) ++flips;
  }
  EXPECT_EQ(flips, 1);
  const auto sym = m.rate_curve(-1.0, 1.0, 0.5);
  ASSERT_EQ(sym.points.size(), 5u);
  EXPECT_EQ(sym.points[0].value, sym.points[4].value);
  EXPECT_EQ(rate::grid_count(0.0, 3.0, 0.01), 301u);
}

TEST(Curves, MgfCurve) {
  const auto& m = model();
  const auto curve = m.mgf_curve(-2.0, 3.0, 0.05);
  ASSERT_EQ(curve.points.size(), 101u);
  for (const auto& p : curve.points) {
    EXPECT_EQ(p.branch == rate::MgfBranch::flat, p.mu <= -m.constants().rho_a_dstar) << p.mu;
  }
}

TEST(RateModel, ConcurrentEvaluationAgrees) {
  const rate::RateModel m;
  std::vector<double> serial;
  for (int i = 0; i < 16; ++i) serial.push_back(m.rate_I(1.0 + 0.1 * i).value);
  const rate::RateModel fresh;
  std::vector<double> par(16);
#pragma omp parallel for
  for (int i = 0; i < 16; ++i) par[i] = fresh.rate_I(1.0 + 0.1 * i).value;
  for (int i = 0; i < 16; ++i) EXPECT_EQ(par[i], serial[i]);
}
