// Builds the affine piecewise solution of φ(φ(x)) = φ(x − 1) + 1/2 + 2x and prints its first branches.
#include "iterfun/piecewise.hpp"
#include "iterfun/verify.hpp"

#include <cstdio>

using namespace iterfun;

int main() {
  PiecewiseOptions o;
  o.x2 = 0.25;
  o.X_target = 50;
  o.X_target_neg = -5;
  const Expr h = parse("x+0.5"), f = parse("x-1"), g = parse("2*x");
  const PiecewiseSolution s = construct(validate_hypotheses(h, f, g, 0.0, o), {});

  std::printf("knots:");
  for (long i = s.min_index(); i <= 5; ++i) std::printf(" %.10g", s.knot(i));
  std::printf(" ...\n");
  for (long i = -1; i <= 3; ++i) {
    const Branch& b = s.branch(i);
    std::printf("branch %2ld on [%g, %g]: phi(lo) = %.10g, phi(hi) = %.10g\n", i, b.lo(), b.hi(), b(b.lo()),
                b(b.hi()));
  }
  for (const auto& c : check_invariants(s))
    std::printf("%-22s %s (value %.3g)\n", c.name.c_str(), c.passed ? "ok" : "FAILED", c.value);

  const RealFn phi = [&s](double x) { return s(x); };
  const auto r = residual(phi, h, f, g, default_probes(-5.0, 20.0, s.knots()), -5.0, 20.0);
  std::printf("sup residual on [-5, 20]: %.3g\n", r.sup_residual_full);
  return 0;
}
