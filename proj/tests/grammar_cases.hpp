// Shared grammar and affine-detection fixtures with hand-written oracles.
#ifndef ITERFUN_TEST_GRAMMAR_CASES_HPP
#define ITERFUN_TEST_GRAMMAR_CASES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace grammar_cases {

struct ValidCase {
  const char* src;
  std::function<double(double)> oracle;
};

struct InvalidCase {
  const char* src;
  const char* kind;
  std::size_t position;
};

inline const std::vector<ValidCase>& valid_cases() {
  static const std::vector<ValidCase> v = {
      {"x", [](double x) { return x; }},
      {"3.5", [](double) { return 3.5; }},
      {"x+1", [](double x) { return x + 1; }},
      {"x - 2*x", [](double x) { return x - 2 * x; }},
      {"2*x+3*x", [](double x) { return 2 * x + 3 * x; }},
      {"x/4", [](double x) { return x / 4; }},
      {"-x", [](double x) { return -x; }},
      {"+x", [](double x) { return x; }},
      {"--x", [](double x) { return x; }},
      {"x - -1", [](double x) { return x + 1; }},
      {"x^2", [](double x) { return std::pow(x, 2.0); }},
      {"x^-1", [](double x) { return 1.0 / x; }},
      {"2^3^2", [](double) { return 512.0; }},
      {"-x^2", [](double x) { return -(x * x); }},
      {"(-x)^2", [](double x) { return x * x; }},
      {"sin(x)", [](double x) { return std::sin(x); }},
      {"cos(x)", [](double x) { return std::cos(x); }},
      {"exp(x)", [](double x) { return std::exp(x); }},
      {"abs(x - 3)", [](double x) { return std::fabs(x - 3); }},
      {"sqrt(x)", [](double x) { return std::sqrt(x); }},
      {"atan(x)", [](double x) { return std::atan(x); }},
      {"sin(cos(x))", [](double x) { return std::sin(std::cos(x)); }},
      {"pi", [](double) { return std::numbers::pi; }},
      {"e", [](double) { return std::numbers::e; }},
      {"2*pi*x", [](double x) { return 2 * std::numbers::pi * x; }},
      {"1e-3*x", [](double x) { return 1e-3 * x; }},
      {"1.5E+2", [](double) { return 150.0; }},
      {".5*x", [](double x) { return 0.5 * x; }},
      {"x^(1/2)", [](double x) { return std::pow(x, 0.5); }},
      {"  x  *  ( 1 + x ) ", [](double x) { return x * (1 + x); }},
      {"x*x*x - x/2 + sin(x)^2", [](double x) { return x * x * x - x / 2 + std::pow(std::sin(x), 2.0); }},
      {"exp(-x^2/2)", [](double x) { return std::exp(-(x * x) / 2); }},
      {"abs(sin(x))*3", [](double x) { return std::fabs(std::sin(x)) * 3; }},
  };
  return v;
}

inline const std::vector<InvalidCase>& invalid_cases() {
  static const std::vector<InvalidCase> v = {
      {"", "syntax-error", 0},
      {"x @ 1", "lexical-error", 2},
      {"x $", "lexical-error", 2},
      {"x # 2", "lexical-error", 2},
      {"sin x", "syntax-error", 4},
      {"sin", "syntax-error", 3},
      {"2x", "syntax-error", 1},
      {"2e", "syntax-error", 1},
      {"3 4", "syntax-error", 2},
      {"x^x", "non-constant-exponent", 1},
      {"2^x", "non-constant-exponent", 1},
      {"x^(x+1)", "non-constant-exponent", 1},
      {"foo(x)", "unknown-function", 0},
      {"y+1", "syntax-error", 0},
      {"(x", "syntax-error", 2},
      {"((x)", "syntax-error", 4},
      {"x)", "syntax-error", 1},
      {"()", "syntax-error", 1},
      {"x +", "syntax-error", 3},
      {"*x", "syntax-error", 0},
      {"x**2", "syntax-error", 2},
      {"x^", "syntax-error", 2},
      {"sin()", "syntax-error", 4},
      {"sin(x,x)", "syntax-error", 5},
      {"sqrt(x", "syntax-error", 6},
      {"1..2", "syntax-error", 2},
  };
  return v;
}

struct AffineFixture {
  const char* src;
  bool affine;
  double slope;
  double intercept;
};

inline const std::vector<AffineFixture>& affine_fixtures() {
  static const std::vector<AffineFixture> fx = {
      {"2*x", true, 2, 0},
      {"x+0.5", true, 1, 0.5},
      {"x-1", true, 1, -1},
      {"-2*x", true, -2, 0},
      {"1*x + 0.5 - 0", true, 1, 0.5},
      {"(3-1)*x", true, 2, 0},
      {"x*4/2", true, 2, 0},
      {"x/4", true, 0.25, 0},
      {"-(x-3)", true, -1, 3},
      {"2*(x+1)", true, 2, 2},
      {"x^1", true, 1, 0},
      {"sqrt(4)*x", true, 2, 0},
      {"2^3*x - x", true, 7, 0},
      {"x + sin(0)", true, 1, 0},
      {"(x+1)/2", true, 0.5, 0.5},
      {"7", true, 0, 7},
      {"x - x", true, 0, 0},
      {"x^2", false, 0, 0},
      {"sin(x)", false, 0, 0},
      {"x*x", false, 0, 0},
      {"1/x", false, 0, 0},
      {"abs(x)", false, 0, 0},
      {"x + sin(x)", false, 0, 0},
  };
  return fx;
}

} // namespace grammar_cases

#endif // ITERFUN_TEST_GRAMMAR_CASES_HPP
