#ifndef ITERFUN_TRUNCATION_HPP
#define ITERFUN_TRUNCATION_HPP

// Solutions on a compact interval I = [a, b] for unbounded g: replace g by
// g̃(x) = g(σ_ω(x)·x), which equals g on I and is bounded, pick ω so that
// Lip(g̃) ≤ β(1 + max(|a|,|b|)/ω) stays in the contraction region, solve
// the bounded problem and restrict to I.

#include "iterfun/conditions.hpp"
#include "iterfun/contraction.hpp"
#include "iterfun/errors.hpp"
#include "iterfun/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

/// Trapezoid cutoff: 1 on [a, b], linear ramps of width ω, 0 beyond.
inline double sigma(double a, double b, double omega, double x) {
  if (x >= a && x <= b) return 1.0;
  if (x <= a - omega || x >= b + omega) return 0.0;
  if (x < a) return (x - (a - omega)) / omega;
  return ((b + omega) - x) / omega;
}

inline RealFn truncate_g(RealFn g, double a, double b, double omega) {
  if (!(a <= b) || !(omega > 0.0)) throw PreconditionError("truncation needs a <= b and omega > 0");
  return [g = std::move(g), a, b, omega](double x) { return g(sigma(a, b, omega, x) * x); };
}

inline RealFn truncate_g(const Expr& g, double a, double b, double omega) {
  return truncate_g([g](double x) { return eval(g, x); }, a, b, omega);
}

/// Lip(g̃) bound for a given ω.
inline double truncated_lipschitz(double beta, double a, double b, double omega) {
  return beta * (1.0 + std::max(std::fabs(a), std::fabs(b)) / omega);
}

struct TruncationPlan {
  double a = 0.0, b = 0.0;
  double omega = 0.0;
  int ladder_step = 0;
  double beta = 0.0;
  double beta_tilde = 0.0;
  RegionVerdict region;  // bounded-region check on (K, α, β̃)
  double margin = 0.0;   // beta_limit − beta_tilde
  bool feasible = false;
};

/// Smallest ω = 2^k·max(1, |a|, |b|) whose β̃ lies in the bounded region
/// for the truncated problem. The gap branch keeps a relative margin of
/// 1e-9 below its strict limit; the quarter-square branch admits equality,
/// as the bounded solver does.
inline TruncationPlan plan_truncation(double K, double alpha, double beta, double a, double b) {
  if (!(a <= b)) throw PreconditionError("interval needs a <= b");
  if (!check_compact_region(K, alpha, beta).holds)
    throw HypothesisError("region-violation",
                          "(K, alpha, beta) outside the compact-interval region", {K, alpha, beta});
  const double base = std::max({1.0, std::fabs(a), std::fabs(b)});
  for (int k = 0; k <= 60; ++k) {
    const double omega = std::ldexp(base, k);
    const double bt = truncated_lipschitz(beta, a, b, omega);
    RegionVerdict v = check_bounded_region(K, alpha, bt);
    const bool inside = v.which == Region::quarter_square_bound
                            ? bt <= v.beta_limit
                            : bt < v.beta_limit * (1.0 - 1e-9);
    if (v.holds && inside)
      return {a, b, omega, k, beta, bt, v, v.beta_limit - bt, true};
  }
  throw HypothesisError("infeasible-plan", "omega ladder exhausted without entering the region",
                        {K, alpha, beta});
}

struct CompactSolution {
  TruncationPlan plan;
  double L = 0.0;
  SolveOptions options;  // after window expansion
  PicardState state;     // solution of the truncated problem on the full window
  SampledFunction restricted;
};

/// Window must hold [a − ω, b + ω] with a 2× guard; grows with the node
/// spacing held fixed.
inline SolveOptions expand_window(SolveOptions opt, const TruncationPlan& plan) {
  const double need = 2.0 * std::max(std::fabs(plan.a - plan.omega), std::fabs(plan.b + plan.omega));
  if (need > opt.W) {
    const double spacing = 2.0 * opt.W / static_cast<double>(opt.grid_n - 1);
    std::size_t cells = static_cast<std::size_t>(std::ceil(2.0 * need / spacing));
    if (cells % 2) ++cells;
    opt.grid_n = cells + 1;
    opt.W = need;
  }
  return opt;
}

inline SampledFunction restrict_to(const SampledFunction& phi, double a, double b) {
  if (!(a < b)) throw PreconditionError("restriction needs a < b");
  std::vector<double> xs{a};
  for (double x : phi.nodes())
    if (x > a && x < b) xs.push_back(x);
  xs.push_back(b);
  return SampledFunction::from_fn(xs, [&phi](double x) { return phi(x); }, Tail::constant(),
                                  Interpolation::linear);
}

inline CompactSolution solve_compact(const FunctionalEquation& eq, double K, double alpha, double beta,
                                     double a, double b, SolveOptions opt = {}) {
  TruncationPlan plan = plan_truncation(K, alpha, beta, a, b);
  opt = expand_window(opt, plan);
  auto win = l_window(K, alpha, plan.beta_tilde);
  if (!win || win->empty()) throw HypothesisError("empty-L-window", "no admissible L for beta_tilde", {});
  const double L = win->midpoint();
  FunctionalEquation truncated{eq.h, eq.f, truncate_g(eq.g, a, b, plan.omega)};
  PicardState st = solve_bounded(truncated, K, L, opt);
  SampledFunction r = restrict_to(st.iterate, a, b);
  return {plan, L, opt, std::move(st), std::move(r)};
}

} // namespace iterfun

#endif // ITERFUN_TRUNCATION_HPP
