#include "iterfun/funcspace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace iterfun;

TEST(UniformGrid, EndpointsExactAndEvenlySpaced) {
  auto g = uniform_grid(-20.0, 20.0, 4001);
  ASSERT_EQ(g.size(), 4001u);
  EXPECT_EQ(g.front(), -20.0);
  EXPECT_EQ(g.back(), 20.0);
  EXPECT_EQ(g[2000], 0.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) EXPECT_NEAR(g[i + 1] - g[i], 0.01, 1e-12);
}

TEST(SampledFunction, RejectsBadNodes) {
  EXPECT_THROW(SampledFunction({0.0}, {1.0}), PreconditionError);
  EXPECT_THROW(SampledFunction({0.0, 1.0}, {1.0}), PreconditionError);
  EXPECT_THROW(SampledFunction({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}), PreconditionError);
  EXPECT_THROW(SampledFunction({0.0, 1.0}, {1.0, NAN}), PreconditionError);
}

TEST(SampledFunction, LinearDataReproducedByBothInterpolants) {
  auto xs = uniform_grid(-3.0, 5.0, 81);
  for (auto interp : {Interpolation::linear, Interpolation::akima}) {
    auto F = SampledFunction::from_fn(xs, [](double x) { return 0.75 * x - 2.0; }, Tail::constant(), interp);
    for (double x = -3.0; x <= 5.0; x += 0.037) EXPECT_NEAR(F(x), 0.75 * x - 2.0, 1e-13);
  }
}

TEST(SampledFunction, TailPolicies) {
  auto xs = uniform_grid(-1.0, 1.0, 21);
  auto C = SampledFunction::from_fn(xs, [](double x) { return x * x; }, Tail::constant());
  EXPECT_EQ(C(-7.0), 1.0);
  EXPECT_EQ(C(9.0), 1.0);
  auto L = SampledFunction::from_fn(xs, [](double x) { return 0.5 * x + std::sin(x); }, Tail::linear(0.5));
  EXPECT_DOUBLE_EQ(L(3.0), L(1.0) + 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(L(-4.0), L(-1.0) - 0.5 * 3.0);
}

TEST(SampledFunction, InterpolationErrorOnSmoothData) {
  const double pi = std::numbers::pi;
  auto xs = uniform_grid(-pi, pi, 401);
  const double h = xs[1] - xs[0];
  auto lin = SampledFunction::from_fn(xs, [](double x) { return std::sin(x); });
  auto ak = SampledFunction::from_fn(xs, [](double x) { return std::sin(x); }, Tail::constant(),
                                     Interpolation::akima);
  double el = 0.0, ea = 0.0;
  for (double x = -pi; x <= pi; x += h / 7.3) {
    el = std::max(el, std::fabs(lin(x) - std::sin(x)));
    ea = std::max(ea, std::fabs(ak(x) - std::sin(x)));
  }
  EXPECT_LE(el, h * h / 8.0 * 1.0001);  // max |f''| = 1
  EXPECT_LT(ea, el / 10.0);
}

TEST(SampledFunction, AkimaKeepsCleanKinks) {
  auto xs = uniform_grid(-1.0, 1.0, 21);
  auto F = SampledFunction::from_fn(xs, [](double x) { return std::fabs(x); }, Tail::constant(),
                                    Interpolation::akima);
  for (double x : {-0.93, -0.31, -0.04, 0.03, 0.27, 0.88}) EXPECT_NEAR(F(x), std::fabs(x), 1e-14);
}

TEST(SampledFunction, AkimaNeedsThreeNodes) {
  SampledFunction F({0.0, 1.0}, {0.0, 2.0}, Tail::constant(), Interpolation::akima);
  EXPECT_EQ(F.interpolation(), Interpolation::linear);
  EXPECT_DOUBLE_EQ(F(0.25), 0.5);
}

TEST(SampledFunction, MaxSegmentSlope) {
  SampledFunction F({0.0, 1.0, 1.5, 3.0}, {0.0, 1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(F.max_segment_slope(), 4.0);
}

TEST(SupDistance, SymmetricAndSeesBetweenNodes) {
  auto xs = uniform_grid(0.0, 1.0, 3);
  SampledFunction F(xs, {0.0, 1.0, 0.0});
  SampledFunction Z(uniform_grid(0.0, 1.0, 2), {0.0, 0.0});
  EXPECT_DOUBLE_EQ(sup_distance(F, Z), 1.0);
  EXPECT_DOUBLE_EQ(sup_distance(Z, F), 1.0);
  EXPECT_EQ(sup_distance(F, F), 0.0);
  // tails count when the windows differ
  SampledFunction W({-2.0, 2.0}, {5.0, 5.0});
  EXPECT_DOUBLE_EQ(sup_distance(Z, W), 5.0);
}

TEST(Lipschitz, SampledBoundsOfSine) {
  auto b = lipschitz_bounds([](double x) { return std::sin(x); }, -10.0, 10.0, 20001);
  EXPECT_LE(b.lower, 1.0);
  EXPECT_GT(b.lower, 0.999);
  EXPECT_EQ(b.upper_estimate, b.lower);
  EXPECT_LT(b.witness_x, b.witness_y);
}

TEST(Expansion, LinearAndNonMonotone) {
  auto e = expansion_bounds([](double x) { return 2.0 * x + 1.0; }, -5.0, 5.0, 101);
  EXPECT_NEAR(e.lower_quotient, 2.0, 1e-12);
  EXPECT_TRUE(e.monotone);
  auto s = expansion_bounds([](double x) { return std::sin(x); }, -5.0, 5.0, 101);
  EXPECT_FALSE(s.monotone);
  EXPECT_EQ(s.lower_quotient, 0.0);
}

TEST(NumericInverse, AffineClosedForm) {
  auto inv = NumericInverse::of(parse("2*x + 1"));
  EXPECT_EQ(inv(5.0), 2.0);
  EXPECT_THROW(NumericInverse::of(parse("3")), PreconditionError);
}

TEST(NumericInverse, NonlinearRoundTrip) {
  auto inv = NumericInverse::of(parse("x + 0.5*sin(x)"));
  for (double y : {-1e6, -37.0, -1.0, 0.0, 0.3, 12.5, 4e8}) {
    const double x = inv(y, y);
    EXPECT_LE(std::fabs(x + 0.5 * std::sin(x) - y), 1e-12 * std::max(1.0, std::fabs(y))) << y;
  }
  // a poor hint only costs bracket doublings
  const double x = inv(1000.0, -1000.0);
  EXPECT_NEAR(x + 0.5 * std::sin(x), 1000.0, 1e-9);
}

TEST(NumericInverse, NotSurjective) {
  auto inv = NumericInverse::of(parse("atan(x)"));
  EXPECT_THROW(inv(2.0), NotSurjectiveError);
  EXPECT_NEAR(inv(1.0), std::tan(1.0), 1e-9);
}

TEST(NumericInverse, DetectsReversalInBracket) {
  NumericInverse inv = NumericInverse::of(parse("x^3 - 3*x"));
  inv.with_bracket(-3.0, 3.0);
  try {
    inv(0.5);
    FAIL() << "expected not-monotone";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.kind(), "not-monotone");
  }
}

TEST(Branch, EvaluationAndDomain) {
  Branch b({0.0, 1.0, 2.0}, {1.0, 3.0, 4.0});
  EXPECT_EQ(b.direction(), Direction::increasing);
  EXPECT_DOUBLE_EQ(b(0.5), 2.0);
  EXPECT_EQ(b(2.0), 4.0);
  EXPECT_THROW(b(2.0000001), DomainError);
  EXPECT_THROW(b(-1e-9), DomainError);
  EXPECT_EQ(b.min_value(), 1.0);
  EXPECT_EQ(b.max_value(), 4.0);
}

TEST(Branch, InverseExactAtNodes) {
  Branch b({0.0, 0.3, 1.7, 2.0}, {-1.0, 0.1, 0.2, 5.0});
  for (std::size_t i = 0; i < b.nodes().size(); ++i) EXPECT_EQ(b.inverse(b.values()[i]), b.nodes()[i]);
  EXPECT_DOUBLE_EQ(b.inverse(2.6), 1.85);
  EXPECT_THROW(b.inverse(6.0), DomainError);
  Branch d({0.0, 1.0}, {3.0, 1.0});
  EXPECT_EQ(d.direction(), Direction::decreasing);
  EXPECT_DOUBLE_EQ(d.inverse(2.0), 0.5);
}

TEST(Branch, PreimagesOfNonMonotone) {
  Branch v({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
  EXPECT_EQ(v.direction(), Direction::non_monotone);
  EXPECT_THROW(v.inverse(0.5), PreconditionError);
  auto p = v.preimages(0.5);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[0], -0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}
