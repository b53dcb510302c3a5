// Solves φ(φ(x)) = 2φ(2x) + sin x by Picard iteration and prints the trace and a few values.
#include "iterfun/conditions.hpp"
#include "iterfun/contraction.hpp"
#include "iterfun/verify.hpp"

#include <cstdio>

using namespace iterfun;

int main() {
  ProblemSpec s;
  s.h = parse("2*x");
  s.f = parse("2*x");
  s.g = parse("sin(x)");
  s.beta = 1.0;
  const ConditionReport cr = estimate_constants(s);
  const double L = default_L(cr, false);
  std::printf("K = %g, alpha = %g, beta = %g, L window [%.6f, %.6f), using L = %.6f\n", cr.K.value, cr.alpha.value,
              cr.beta.value, cr.L_window->lo, cr.L_window->hi, L);

  const FunctionalEquation eq = FunctionalEquation::of(s);
  const PicardState st = solve_bounded(eq, cr.K.value, L);
  for (std::size_t k = 0; k < st.distances.size(); ++k) std::printf("iter %2zu  d = %.3e\n", k + 1, st.distances[k]);

  for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 3.0}) std::printf("phi(%g) = %.12f\n", x, st.iterate(x));
  const RealFn phi = [&st](double x) { return st.iterate(x); };
  const auto r = residual(phi, eq.h, eq.f, eq.g, default_probes(-10.0, 10.0), -10.0, 10.0);
  std::printf("interior residual on [-10, 10]: %.3g\n", r.sup_residual_interior);
  return 0;
}
