#include "iterfun/conditions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace iterfun;

namespace {

// Written out independently of the library: |λ| > max{2, 2√|μ|} or 1 + |μ| < |λ| ≤ 2.
bool linear_disjunction(double lambda, double mu) {
  const double l = std::fabs(lambda), m = std::fabs(mu);
  if (l > 2.0 && l > 2.0 * std::sqrt(m)) return true;
  return 1.0 + m < l && l <= 2.0;
}

ProblemSpec spec_of(const char* h, const char* f, const char* g) {
  ProblemSpec s;
  s.h = parse(h);
  s.f = parse(f);
  s.g = parse(g);
  return s;
}

} // namespace

TEST(LinearCase, AgreesWithClosedFormOnGrid) {
  int disagreements = 0, inside = 0;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const double lambda = -5.0 + 10.0 * i / 199.0;
      const double mu = -5.0 + 10.0 * j / 199.0;
      bool got = false;
      try {
        got = check_linear_case(lambda, mu);
      } catch (const std::logic_error&) {
        ++disagreements;
        continue;
      }
      if (got != linear_disjunction(lambda, mu)) ++disagreements;
      inside += got;
    }
  EXPECT_EQ(disagreements, 0);
  EXPECT_GT(inside, 0);
  EXPECT_LT(inside, 200 * 200);
}

TEST(LinearCase, BoundaryPoints) {
  EXPECT_FALSE(check_linear_case(2.0, 1.0));   // 1 + 1 < 2 fails
  EXPECT_TRUE(check_linear_case(2.0, 0.5));
  EXPECT_FALSE(check_linear_case(4.0, 4.0));   // 4 > 2·2 fails
  EXPECT_TRUE(check_linear_case(-4.0, 3.99));
  EXPECT_FALSE(check_linear_case(1.0, 0.0));
  EXPECT_FALSE(check_linear_case(0.5, 0.0));
}

TEST(Regions, ContractionGapBranchAndWindow) {
  auto v = check_bounded_region(2.0, 2.0, 2.0);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.which, Region::contraction_gap_bound);
  EXPECT_DOUBLE_EQ(v.alpha_threshold, 1.0);
  EXPECT_DOUBLE_EQ(v.beta_limit, 3.0);
  ASSERT_TRUE(v.window.has_value());
  EXPECT_NEAR(v.window->lo, 2.0 - std::sqrt(2.0), 1e-15);
  EXPECT_EQ(v.window->hi, 1.0);
  EXPECT_TRUE(v.window->contains(0.75));
  EXPECT_FALSE(v.window->contains(1.0));
  EXPECT_FALSE(check_bounded_region(2.0, 2.0, 3.0).holds);
}

TEST(Regions, QuarterSquareStrictness) {
  // K = 4, α = 1 < 2(1 − 1/4) = 1.5; limit ¼·1·16 = 4
  auto b = check_bounded_region(4.0, 1.0, 4.0);
  auto c = check_compact_region(4.0, 1.0, 4.0);
  EXPECT_TRUE(b.holds);
  EXPECT_EQ(b.which, Region::quarter_square_bound);
  EXPECT_FALSE(c.holds);
  EXPECT_TRUE(check_compact_region(4.0, 1.0, 3.999).holds);
  // zero discriminant at the limit: lo = ½αK
  EXPECT_DOUBLE_EQ(b.window->lo, 2.0);
}

TEST(Regions, Preconditions) {
  EXPECT_THROW(check_bounded_region(1.0, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(check_bounded_region(2.0, 0.0, 0.0), PreconditionError);
  EXPECT_THROW(check_bounded_region(2.0, 1.0, -1.0), PreconditionError);
  EXPECT_FALSE(l_window(2.0, 1.0, 2.0).has_value());
}

TEST(Kappa, VietaOnRandomCoefficients) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-6.0, 6.0);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const double a = U(rng), b = U(rng), c = U(rng);
    const double p = a * b;
    if (p * p + 4 * c < 0) {
      EXPECT_THROW(compute_kappa(a, b, c), HypothesisError);
      continue;
    }
    auto r = compute_kappa(a, b, c);
    const double scale = std::max({1.0, std::fabs(p), std::fabs(c)});
    EXPECT_NEAR(r.k1 + r.k2, p, 1e-12 * scale);
    EXPECT_NEAR(r.k1 * r.k2, -c, 1e-12 * scale * scale);
    EXPECT_LE(std::fabs(r.star), std::max(std::fabs(r.k1), std::fabs(r.k2)));
    EXPECT_TRUE(r.star == r.k1 || r.star == r.k2);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Kappa, AsymptoticExampleSlope) {
  // κ² + 4κ − 1 = 0 by the quadratic formula
  const double oracle = (-4.0 + std::sqrt(16.0 + 4.0)) / 2.0;
  auto r = compute_kappa(-2.0, 2.0, 1.0);
  EXPECT_NEAR(r.star, oracle, 1e-12);
  EXPECT_NEAR(r.star, std::sqrt(5.0) - 2.0, 1e-12);
}

TEST(Kappa, TinyRootKeepsRelativeAccuracy) {
  // roots 1e8 and −1e-8: naive formula loses the small one completely
  auto r = compute_kappa(1e8, 1.0, 1.0);
  EXPECT_NEAR(r.star, -1e-8, 1e-22);
}

TEST(Estimate, BoundedExample) {
  auto s = spec_of("2*x", "2*x", "sin(x)");
  s.beta = 2.0;
  auto r = estimate_constants(s);
  EXPECT_EQ(r.K.value, 2.0);
  EXPECT_EQ(r.K.source, ConstantSource::affine);
  EXPECT_EQ(r.alpha.value, 2.0);
  EXPECT_EQ(r.beta.source, ConstantSource::certified);
  ASSERT_TRUE(r.kappa_g.has_value());
  EXPECT_EQ(r.kappa_g->value, 0.0);
  EXPECT_EQ(r.kappa_g->source, ConstantSource::structural);
  EXPECT_TRUE(r.g_bounded);
  EXPECT_TRUE(r.applies("bounded"));
  EXPECT_TRUE(r.applies("compact"));
  EXPECT_FALSE(r.applies("asymptotic"));
  EXPECT_FALSE(r.has_heuristic());
  EXPECT_NEAR(default_L(r, false), 0.5 * (2.0 - std::sqrt(2.0) + 1.0), 1e-15);
}

TEST(Estimate, AsymptoticExample) {
  auto r = estimate_constants(spec_of("-2*x", "2*x", "x + sin(x)"));
  EXPECT_EQ(r.K.value, 2.0);
  EXPECT_EQ(r.kappa_h->value, -2.0);
  EXPECT_EQ(r.kappa_g->value, 1.0);
  EXPECT_FALSE(r.g_bounded);
  EXPECT_FALSE(r.applies("bounded"));
  EXPECT_TRUE(r.applies("asymptotic"));
  ASSERT_TRUE(r.kappa.has_value());
  EXPECT_NEAR(r.kappa->star, std::sqrt(5.0) - 2.0, 1e-12);
  // β of x + sin x is sampled
  EXPECT_EQ(r.beta.source, ConstantSource::heuristic);
  EXPECT_FALSE(r.warnings.empty());
  const double L = default_L(r, true);
  EXPECT_TRUE(r.L_window->contains(L));
  EXPECT_GE(L, r.kappa->star);
}

TEST(Estimate, NonExpansiveHIsAHypothesisViolation) {
  try {
    estimate_constants(spec_of("x", "2*x", "sin(x)"));
    FAIL();
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.kind(), "hypothesis-violation");
  }
  EXPECT_THROW(estimate_constants(spec_of("2*x + 3*sin(x)", "2*x", "0")), HypothesisError);
}

TEST(Estimate, SampledExpansionIsHeuristic) {
  auto r = estimate_constants(spec_of("2*x + 0.5*sin(x)", "2*x", "cos(x)"));
  EXPECT_EQ(r.K.source, ConstantSource::heuristic);
  EXPECT_GE(r.K.value, 1.5 - 1e-6);
  EXPECT_LE(r.K.value, 1.5 + 1e-3);
  EXPECT_TRUE(r.has_heuristic());
}

TEST(Estimate, EmptyWindowHasNoDefaultL) {
  auto s = spec_of("2*x", "0.1*x", "sin(x)");
  s.beta = 5.0;
  auto r = estimate_constants(s);
  EXPECT_FALSE(r.applies("bounded"));
  EXPECT_THROW(default_L(r, false), HypothesisError);
}
