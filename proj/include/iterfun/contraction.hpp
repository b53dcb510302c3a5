#ifndef ITERFUN_CONTRACTION_HPP
#define ITERFUN_CONTRACTION_HPP

// The operator (Tφ)(x) = h⁻¹(φ(φ(f⁻¹(x))) − g(f⁻¹(x))) on a uniform grid and
// Picard iteration to its fixed point, for bounded φ and for φ = κ*x + bounded.

#include "iterfun/conditions.hpp"
#include "iterfun/errors.hpp"
#include "iterfun/exprlang.hpp"
#include "iterfun/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

/// φ(φ(x)) = h(φ(f(x))) + g(x). g is a plain function so truncated
/// versions can be substituted.
struct FunctionalEquation {
  Expr h;
  Expr f;
  RealFn g;

  static FunctionalEquation of(const ProblemSpec& spec) {
    Expr g = spec.g;
    return {spec.h, spec.f, [g](double x) { return eval(g, x); }};
  }
};

/// T bound to a node grid: f⁻¹ and g∘f⁻¹ at the nodes are computed once.
class Operator {
public:
  Operator(const FunctionalEquation& eq, std::vector<double> nodes)
      : nodes_(std::move(nodes)), hinv_(NumericInverse::of(eq.h)) {
    NumericInverse finv = NumericInverse::of(eq.f);
    const auto kf = linear_growth(eq.f);
    const auto kh = linear_growth(eq.h);
    h_slope_ = kh && *kh != 0.0 ? *kh : 0.0;
    u_.resize(nodes_.size());
    gu_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double x = nodes_[i];
      // brackets grown around the linear-growth prediction
      const double hint = kf && *kf != 0.0 ? x / *kf : 0.0;
      u_[i] = finv(x, hint);
      gu_[i] = eq.g(u_[i]);
      if (!std::isfinite(gu_[i])) throw EvalError("non-finite g(f^-1(x)) at node", x);
    }
  }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& preimages() const { return u_; }

  SampledFunction apply(const SampledFunction& phi) const {
    std::vector<double> out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double y = phi(phi(u_[i])) - gu_[i];
      const double v = hinv_(y, h_slope_ != 0.0 ? y / h_slope_ : 0.0);
      if (!std::isfinite(v)) throw EvalError("non-finite value of T(phi) at node", nodes_[i]);
      out[i] = v;
    }
    return SampledFunction(nodes_, std::move(out), phi.tail(), phi.interpolation());
  }

private:
  std::vector<double> nodes_;
  NumericInverse hinv_;
  double h_slope_ = 0.0;
  std::vector<double> u_;
  std::vector<double> gu_;
};

/// One application of T on a fresh uniform grid over [-W, W].
inline SampledFunction apply_T(const SampledFunction& phi, const FunctionalEquation& eq, double W,
                               std::size_t grid_n) {
  return Operator(eq, uniform_grid(-W, W, grid_n)).apply(phi);
}

struct PicardState {
  SampledFunction iterate;
  std::size_t iterations = 0;
  std::vector<double> distances;
  std::vector<double> contraction_ratios;
  double q = 0.0;  // (L + 1) / K
  double L = 0.0;
  bool converged = false;
};

struct SolveOptions {
  double W = 20.0;
  std::size_t grid_n = 4001;
  double tol = 1e-8;
  std::size_t max_iter = 200;
  // Linear interpolation cannot reach 1e-6 residuals on the default grid;
  // the solvers interpolate iterates with Akima cubics.
  Interpolation interpolation = Interpolation::akima;
};

/// Iterates φ ← Tφ until d(φ_{n+1}, φ_n) ≤ tol·(1 − q). This also gives
/// the a-posteriori bound d·q/(1 − q) ≤ tol to the fixed point.
inline PicardState picard(const Operator& T, SampledFunction seed, double K, double L,
                          const SolveOptions& opt) {
  if (!(opt.tol > 0.0)) throw PreconditionError("tol must be positive");
  const double q = (L + 1.0) / K;
  if (!(q < 1.0))
    throw PreconditionError("contraction factor (L+1)/K = " + std::to_string(q) + " is not below 1");
  PicardState st{std::move(seed), 0, {}, {}, q, L, false};
  for (std::size_t n = 0; n < opt.max_iter; ++n) {
    SampledFunction next = T.apply(st.iterate);
    const double d = sup_distance(next, st.iterate);
    if (!st.distances.empty())
      st.contraction_ratios.push_back(st.distances.back() > 0.0 ? d / st.distances.back() : 0.0);
    st.distances.push_back(d);
    st.iterate = std::move(next);
    st.iterations = n + 1;
    if (d <= opt.tol * (1.0 - q)) {
      st.converged = true;
      return st;
    }
  }
  throw ConvergenceError("no convergence after " + std::to_string(opt.max_iter) +
                             " iterations; last distance " + std::to_string(st.distances.back()),
                         st.distances);
}

/// Bounded continuous solution from φ₀ ≡ 0 with constant tails.
inline PicardState solve_bounded(const FunctionalEquation& eq, double K, double L,
                                 const SolveOptions& opt = {}) {
  Operator T(eq, uniform_grid(-opt.W, opt.W, opt.grid_n));
  SampledFunction seed(T.nodes(), std::vector<double>(T.nodes().size(), 0.0), Tail::constant(),
                       opt.interpolation);
  return picard(T, std::move(seed), K, L, opt);
}

/// Solution of the form κ*x + bounded, seeded with κ*x and extended by
/// linear tails of slope κ*.
inline PicardState solve_asymptotic(const FunctionalEquation& eq, double K, double L,
                                    double kappa_star, const SolveOptions& opt = {}) {
  if (std::fabs(kappa_star) > L)
    throw PreconditionError("|kappa_star| exceeds L: the solution space around kappa_star x is empty");
  Operator T(eq, uniform_grid(-opt.W, opt.W, opt.grid_n));
  auto seed = SampledFunction::from_fn(T.nodes(), [kappa_star](double x) { return kappa_star * x; },
                                       Tail::linear(kappa_star), opt.interpolation);
  return picard(T, std::move(seed), K, L, opt);
}

/// max over nodes of |φ(x) − κx| restricted to |x| ≤ R.
inline double max_deviation_from_line(const SampledFunction& phi, double kappa, double R) {
  double m = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (std::fabs(phi.nodes()[i]) <= R)
      m = std::max(m, std::fabs(phi.values()[i] - kappa * phi.nodes()[i]));
  return m;
}

} // namespace iterfun

#endif // ITERFUN_CONTRACTION_HPP
