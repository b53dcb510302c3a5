#include "iterfun/exprlang.hpp"
#include "grammar_cases.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace iterfun;
using namespace grammar_cases;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

} // namespace

TEST(ExprGrammar, HasAtLeastFiftyCases) { EXPECT_GE(valid_cases().size() + invalid_cases().size(), 50u); }

TEST(ExprGrammar, ValidExpressionsEvaluateLikeDirectFormulas) {
  for (const auto& c : valid_cases()) {
    SCOPED_TRACE(c.src);
    const Expr e = parse(c.src);
    for (double x : {0.25, 1.5, 2.75}) EXPECT_DOUBLE_EQ(eval(e, x), c.oracle(x));
  }
}

TEST(ExprGrammar, InvalidExpressionsReportKindAndOffset) {
  for (const auto& c : invalid_cases()) {
    SCOPED_TRACE(c.src);
    try {
      parse(c.src);
      ADD_FAILURE() << "no error";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), c.kind);
      EXPECT_EQ(e.position(), c.position);
    }
  }
}

TEST(ExprTokens, ExponentNeedsDigits) {
  auto t = tokenize("2e");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].kind, TokenKind::number);
  EXPECT_EQ(t[0].number, 2.0);
  EXPECT_EQ(t[1].kind, TokenKind::identifier);
  EXPECT_EQ(t[1].lexeme, "e");
  auto u = tokenize("1.5e-3");
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0].number, 1.5e-3);
}

TEST(ExprFolding, ConstantSubtreesCollapse) {
  EXPECT_TRUE(parse("2^3^2").is_constant());
  EXPECT_EQ(parse("2^3^2").value(), 512.0);
  EXPECT_TRUE(parse("sin(0) + 3*2").is_constant());
  EXPECT_FALSE(parse("2^3^2", {false}).is_constant());
  // non-finite folds are kept so the error surfaces at evaluation
  EXPECT_FALSE(parse("1/0").is_constant());
  EXPECT_THROW(eval(parse("1/0"), 0.0), EvalError);
}

TEST(ExprEval, NonFiniteValuesRaise) {
  EXPECT_THROW(eval(parse("1/x"), 0.0), EvalError);
  EXPECT_THROW(eval(parse("sqrt(x)"), -1.0), EvalError);
  EXPECT_THROW(eval(parse("exp(x)"), 1000.0), EvalError);
  try {
    eval(parse("1/x"), 0.0);
  } catch (const EvalError& e) {
    EXPECT_EQ(e.x(), 0.0);
  }
}

// The parser must build the tree a human would build by hand; evaluation of
// both must agree bit for bit, and with the direct C++ expression.
TEST(ExprEval, BitExactAgainstHandBuiltTree) {
  using K = NodeKind;
  const Expr x = Expr::variable();
  const Expr c2 = Expr::constant(2.0), c3 = Expr::constant(3.0), half = Expr::constant(0.5);
  // x*x - 3*sin(x)/2 + exp(-x)*0.5
  const Expr hand = Expr::binary(
      K::add,
      Expr::binary(K::sub, Expr::binary(K::mul, x, x),
                   Expr::binary(K::div, Expr::binary(K::mul, c3, Expr::call(Function::sin, x)), c2)),
      Expr::binary(K::mul, Expr::call(Function::exp, Expr::negate(x)), half));
  const Expr parsed = parse("x*x - 3*sin(x)/2 + exp(-x)*0.5");
  EXPECT_TRUE(parsed == hand);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = U(rng);
    const double direct = v * v - 3 * std::sin(v) / 2 + std::exp(-v) * 0.5;
    ASSERT_EQ(bits(eval(parsed, v)), bits(eval(hand, v)));
    ASSERT_EQ(bits(eval(parsed, v)), bits(direct));
  }
}

namespace {

std::string random_source(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  std::uniform_real_distribution<double> num(-9.0, 9.0);
  const int k = pick(rng);
  switch (k) {
  case 0:
  case 1: return "x";
  case 2: {
    const double v = std::round(num(rng) * 100.0) / 100.0;
    return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
  }
  case 3: return "(" + random_source(rng, depth - 1) + " + " + random_source(rng, depth - 1) + ")";
  case 4: return "(" + random_source(rng, depth - 1) + " - " + random_source(rng, depth - 1) + ")";
  case 5: return random_source(rng, depth - 1) + " * " + random_source(rng, depth - 1);
  case 6: return "(" + random_source(rng, depth - 1) + ") / 3";
  case 7: return "-" + random_source(rng, depth - 1);
  case 8: return "(" + random_source(rng, depth - 1) + ")^2";
  case 9: return "sin(" + random_source(rng, depth - 1) + ")";
  default: return "atan(" + random_source(rng, depth - 1) + ")";
  }
}

} // namespace

TEST(ExprPrinter, RoundTripPreservesTreeAndValues) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const std::string src = random_source(rng, 5);
    SCOPED_TRACE(src);
    const Expr a = parse(src);
    const std::string printed = to_string(a);
    const Expr b = parse(printed);
    ASSERT_TRUE(a == b) << printed;
    EXPECT_EQ(to_string(b), printed);
    for (double x : {-1.25, 0.0, 0.75, 3.0}) {
      double va = 0, vb = 0;
      bool ea = false, eb = false;
      try { va = eval(a, x); } catch (const EvalError&) { ea = true; }
      try { vb = eval(b, x); } catch (const EvalError&) { eb = true; }
      ASSERT_EQ(ea, eb);
      if (!ea) {
        ASSERT_EQ(bits(va), bits(vb));
      }
    }
  }
}

TEST(ExprPrinter, ShortestRoundTripConstants) {
  EXPECT_EQ(to_string(parse("0.1")), "0.1");
  EXPECT_EQ(to_string(parse("-2")), "(-2)");
  const Expr third = parse("1/3");
  EXPECT_EQ(parse(to_string(third)).value(), 1.0 / 3.0);
}

TEST(ExprAffine, Fixtures) {
  const auto& fx = affine_fixtures();
  EXPECT_GE(fx.size(), 20u);
  for (const auto& f : fx) {
    SCOPED_TRACE(f.src);
    const auto a = affine_pattern(parse(f.src));
    ASSERT_EQ(a.has_value(), f.affine);
    if (a) {
      EXPECT_DOUBLE_EQ(a->slope, f.slope);
      EXPECT_DOUBLE_EQ(a->intercept, f.intercept);
    }
  }
}

TEST(ExprAffine, AgreesWithEvaluationOnRandomCompositions) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double a = c(rng), b = c(rng), d = c(rng);
    const std::string src = "(" + std::to_string(a) + ")*(x - (" + std::to_string(b) + "))/2 + " +
                            std::to_string(std::fabs(d)) + "*x";
    const Expr e = parse(src);
    const auto aff = affine_pattern(e);
    ASSERT_TRUE(aff.has_value()) << src;
    for (double x : {-3.0, 0.5, 10.0}) {
      const double v = eval(e, x), w = aff->slope * x + aff->intercept;
      EXPECT_NEAR(v, w, 16 * std::numeric_limits<double>::epsilon() * (1 + std::fabs(v) + std::fabs(a * x)));
    }
  }
}

TEST(ExprGrowth, StructuralSlopes) {
  EXPECT_EQ(linear_growth(parse("x + sin(x)")), 1.0);
  EXPECT_EQ(linear_growth(parse("-2*x + 3*cos(x)^2")), -2.0);
  EXPECT_EQ(linear_growth(parse("sin(x)")), 0.0);
  EXPECT_EQ(linear_growth(parse("atan(x)*sin(x)")), 0.0);
  EXPECT_FALSE(linear_growth(parse("x^2")).has_value());
  EXPECT_FALSE(linear_growth(parse("abs(x)")).has_value());
  EXPECT_FALSE(linear_growth(parse("x*sin(x)")).has_value());
}
