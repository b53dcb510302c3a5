#ifndef ITERFUN_CONDITIONS_HPP
#define ITERFUN_CONDITIONS_HPP

// Which existence result applies to a problem (h, f, g): expansion and
// Lipschitz constants, parameter-region inequalities, the admissible
// window of Lipschitz budgets L and the asymptotic slope roots.

#include "iterfun/errors.hpp"
#include "iterfun/exprlang.hpp"
#include "iterfun/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

enum class ConstantSource { certified, affine, structural, heuristic };

inline const char* source_name(ConstantSource s) {
  switch (s) {
  case ConstantSource::certified: return "certified";
  case ConstantSource::affine: return "affine";
  case ConstantSource::structural: return "structural";
  default: return "heuristic";
  }
}

/// A constant with where it came from. Only "heuristic" values are sampled
/// estimates; affine and structural ones are exact readings of the syntax.
struct Constant {
  double value = 0.0;
  ConstantSource source = ConstantSource::heuristic;
};

struct ProblemSpec {
  Expr h = Expr::variable();
  Expr f = Expr::variable();
  Expr g = Expr::constant(0.0);
  // user-certified constants; missing ones are estimated
  std::optional<double> K, alpha, beta, kappa_h, kappa_f, kappa_g;
  double W = 20.0;
  std::size_t sample_n = 4001;
};

/// Admissible Lipschitz budgets [lo, hi).
struct LWindow {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo < hi); }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double L) const { return L >= lo && L < hi; }
};

enum class Region { none, quarter_square_bound, contraction_gap_bound };

inline const char* region_name(Region r) {
  switch (r) {
  case Region::quarter_square_bound: return "quarter_square_bound";
  case Region::contraction_gap_bound: return "contraction_gap_bound";
  default: return "none";
  }
}

struct RegionVerdict {
  bool holds = false;
  Region which = Region::none;
  double alpha_threshold = 0.0;  // 2(1 - 1/K): picks which inequality is tested
  double beta_limit = 0.0;       // right-hand side of the tested inequality
  std::optional<LWindow> window;
};

/// [½αK − ½√(α²K²−4β), K−1) when the discriminant is non-negative.
inline std::optional<LWindow> l_window(double K, double alpha, double beta) {
  const double disc = alpha * alpha * K * K - 4.0 * beta;
  if (disc < 0.0) return std::nullopt;
  return LWindow{0.5 * alpha * K - 0.5 * std::sqrt(disc), K - 1.0};
}

namespace detail {

inline RegionVerdict check_region(double K, double alpha, double beta, bool strict_quarter) {
  if (!(K > 1.0) || !(alpha > 0.0) || !(beta >= 0.0))
    throw PreconditionError("region check needs K > 1, alpha > 0, beta >= 0");
  RegionVerdict v;
  v.alpha_threshold = 2.0 * (1.0 - 1.0 / K);
  if (alpha < v.alpha_threshold) {
    v.beta_limit = 0.25 * alpha * alpha * K * K;
    v.holds = strict_quarter ? beta < v.beta_limit : beta <= v.beta_limit;
    v.which = Region::quarter_square_bound;
  } else {
    v.beta_limit = (K - 1.0) * (alpha * K - K + 1.0);
    v.holds = beta < v.beta_limit;
    v.which = Region::contraction_gap_bound;
  }
  if (!v.holds) v.which = Region::none;
  v.window = l_window(K, alpha, beta);
  return v;
}

} // namespace detail

/// Region where the operator is a contractive self-map of bounded
/// L-Lipschitz functions: β ≤ ¼α²K² for α < 2(1−1/K), otherwise
/// β < (K−1)(αK−K+1).
inline RegionVerdict check_bounded_region(double K, double alpha, double beta) {
  return detail::check_region(K, alpha, beta, false);
}

/// Same with strict β < ¼α²K², as needed after truncating g.
inline RegionVerdict check_compact_region(double K, double alpha, double beta) {
  return detail::check_region(K, alpha, beta, true);
}

struct KappaRoots {
  double k1;
  double k2;
  double star;  // root of smaller magnitude, ties to k1
};

/// Real roots of κ² − κ_hκ_f κ − κ_g = 0, computed without cancellation.
inline KappaRoots compute_kappa(double kappa_h, double kappa_f, double kappa_g) {
  const double p = kappa_h * kappa_f;
  const double disc = p * p + 4.0 * kappa_g;
  if (disc < 0.0)
    throw HypothesisError("no-real-root",
                          "kappa_h^2 kappa_f^2 + 4 kappa_g = " + std::to_string(disc) +
                              " < 0: no real asymptotic slope",
                          {kappa_h, kappa_f, kappa_g});
  const double s = std::sqrt(disc);
  double k1, k2;
  if (p >= 0.0) {
    k1 = 0.5 * (p + s);
    k2 = k1 != 0.0 ? -kappa_g / k1 : 0.5 * (p - s);
  } else {
    k2 = 0.5 * (p - s);
    k1 = -kappa_g / k2;
  }
  return {k1, k2, std::fabs(k1) <= std::fabs(k2) ? k1 : k2};
}

/// Closed form for h = λx, f = x + a, g = μx:
/// |λ| > max{2, 2√|μ|} or 1 + |μ| < |λ| ≤ 2.
inline bool linear_case_closed_form(double lambda, double mu) {
  const double L = std::fabs(lambda), M = std::fabs(mu);
  return L > std::max(2.0, 2.0 * std::sqrt(M)) || (1.0 + M < L && L <= 2.0);
}

/// The same verdict through the strict region check with K = |λ|, α = 1,
/// β = |μ|; the two must agree.
inline bool check_linear_case(double lambda, double mu) {
  const double K = std::fabs(lambda), beta = std::fabs(mu);
  const bool region = K > 1.0 && check_compact_region(K, 1.0, beta).holds;
  if (region != linear_case_closed_form(lambda, mu))
    throw std::logic_error("linear-case reduction disagrees with the closed form at lambda = " +
                           std::to_string(lambda) + ", mu = " + std::to_string(mu));
  return region;
}

struct ConditionReport {
  Constant K, alpha, beta;
  std::optional<Constant> kappa_h, kappa_f, kappa_g;
  bool g_bounded = false;
  RegionVerdict bounded_region;  // non-strict quarter-square branch
  RegionVerdict compact_region;  // strict quarter-square branch
  std::optional<KappaRoots> kappa;
  std::optional<LWindow> L_window;
  std::vector<std::string> applicable;  // subset of bounded, compact, asymptotic
  std::vector<std::string> warnings;

  bool applies(const std::string& regime) const {
    return std::find(applicable.begin(), applicable.end(), regime) != applicable.end();
  }
  bool has_heuristic() const {
    for (const Constant* c : {&K, &alpha, &beta})
      if (c->source == ConstantSource::heuristic) return true;
    for (const auto* c : {&kappa_h, &kappa_f, &kappa_g})
      if (*c && (*c)->source == ConstantSource::heuristic) return true;
    return false;
  }
};

namespace detail {

// Least-squares slope on the window, accepted when the residual on the full
// window is not much larger than on its middle half.
inline std::optional<double> sampled_linear_growth(const Expr& e, double W, std::size_t n) {
  auto xs = uniform_grid(-W, W, n);
  std::vector<double> ys(n);
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = eval(e, xs[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  double half = 0, full = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::fabs(ys[i] - slope * xs[i]);
    full = std::max(full, r);
    if (std::fabs(xs[i]) <= 0.5 * W) half = std::max(half, r);
  }
  if (full <= 1.5 * half + 1e-9 * std::max(1.0, std::fabs(slope) * W)) return slope;
  return std::nullopt;
}

inline std::optional<Constant> growth_constant(const Expr& e, const std::optional<double>& user,
                                               double W, std::size_t n) {
  if (user) return Constant{*user, ConstantSource::certified};
  if (auto a = affine_pattern(e)) return Constant{a->slope, ConstantSource::affine};
  if (auto s = linear_growth(e)) return Constant{*s, ConstantSource::structural};
  if (auto s = sampled_linear_growth(e, W, n)) return Constant{*s, ConstantSource::heuristic};
  return std::nullopt;
}

inline Constant expansion_constant(const char* name, const Expr& e, const std::optional<double>& user,
                                   double W, std::size_t n, double must_exceed) {
  const std::string who = name;
  if (user) {
    if (!(*user > must_exceed))
      throw HypothesisError("hypothesis-violation",
                            "certified " + who + " = " + std::to_string(*user) + " must exceed " +
                                std::to_string(must_exceed),
                            {});
    return {*user, ConstantSource::certified};
  }
  if (auto a = affine_pattern(e)) {
    const double v = std::fabs(a->slope);
    if (!(v > must_exceed))
      throw HypothesisError("hypothesis-violation",
                            who + " = |slope| = " + std::to_string(v) + " does not exceed " +
                                std::to_string(must_exceed),
                            {-1.0, 1.0});
    return {v, ConstantSource::affine};
  }
  auto eb = expansion_bounds([&e](double x) { return eval(e, x); }, -W, W, n);
  if (!(eb.lower_quotient > must_exceed))
    throw HypothesisError("hypothesis-violation",
                          who + ": sampled divided difference " + std::to_string(eb.lower_quotient) +
                              " does not exceed " + std::to_string(must_exceed),
                          {eb.witness_x, eb.witness_y});
  return {eb.lower_quotient, ConstantSource::heuristic};
}

} // namespace detail

/// Fills missing constants (affine and structural readings are exact;
/// sampled ones are flagged heuristic) and evaluates every region test.
inline ConditionReport estimate_constants(const ProblemSpec& spec) {
  if (!(spec.W > 0.0)) throw PreconditionError("window half-width W must be positive");
  const double W = spec.W;
  const std::size_t n = std::max<std::size_t>(spec.sample_n, 3);
  ConditionReport r;
  r.K = detail::expansion_constant("K (expansion of h)", spec.h, spec.K, W, n, 1.0);
  r.alpha = detail::expansion_constant("alpha (expansion of f)", spec.f, spec.alpha, W, n, 0.0);
  if (spec.beta) {
    if (!(*spec.beta >= 0.0)) throw HypothesisError("hypothesis-violation", "beta must be >= 0", {});
    r.beta = {*spec.beta, ConstantSource::certified};
  } else if (auto a = affine_pattern(spec.g)) {
    r.beta = {std::fabs(a->slope), ConstantSource::affine};
  } else {
    auto lb = lipschitz_bounds([&](double x) { return eval(spec.g, x); }, -W, W, n);
    r.beta = {lb.upper_estimate, ConstantSource::heuristic};
  }

  r.kappa_h = detail::growth_constant(spec.h, spec.kappa_h, W, n);
  r.kappa_f = detail::growth_constant(spec.f, spec.kappa_f, W, n);
  r.kappa_g = detail::growth_constant(spec.g, spec.kappa_g, W, n);
  r.g_bounded = r.kappa_g && r.kappa_g->value == 0.0;

  r.bounded_region = check_bounded_region(r.K.value, r.alpha.value, r.beta.value);
  r.compact_region = check_compact_region(r.K.value, r.alpha.value, r.beta.value);
  r.L_window = r.bounded_region.window;

  if (r.bounded_region.holds && r.g_bounded) r.applicable.push_back("bounded");
  if (r.compact_region.holds) r.applicable.push_back("compact");
  if (r.kappa_h && r.kappa_f && r.kappa_g && r.kappa_g->value != 0.0) {
    try {
      r.kappa = compute_kappa(r.kappa_h->value, r.kappa_f->value, r.kappa_g->value);
      if (r.bounded_region.holds && r.L_window && std::fabs(r.kappa->star) < r.L_window->hi)
        r.applicable.push_back("asymptotic");
    } catch (const HypothesisError& e) {
      r.warnings.push_back(e.what());
    }
  }

  for (const auto& [name, c] : {std::pair<const char*, const Constant*>{"K", &r.K},
                                {"alpha", &r.alpha}, {"beta", &r.beta}})
    if (c->source == ConstantSource::heuristic)
      r.warnings.push_back(std::string(name) + " is a sampled estimate on [-W, W], not certified");
  for (const auto& [name, c] : {std::pair<const char*, const std::optional<Constant>*>{
                                    "kappa_h", &r.kappa_h},
                                {"kappa_f", &r.kappa_f}, {"kappa_g", &r.kappa_g}})
    if (*c && (*c)->source == ConstantSource::heuristic)
      r.warnings.push_back(std::string(name) + " is a least-squares estimate, not certified");
  return r;
}

/// Default budget: the window midpoint; in the asymptotic regime also at
/// least |κ*| so the space around κ*x is non-empty.
inline double default_L(const ConditionReport& r, bool asymptotic) {
  if (!r.L_window || r.L_window->empty())
    throw HypothesisError("empty-L-window", "no admissible Lipschitz budget L", {});
  double L = r.L_window->midpoint();
  if (asymptotic && r.kappa) L = std::max(L, std::fabs(r.kappa->star));
  if (!r.L_window->contains(L))
    throw HypothesisError("empty-L-window", "|kappa_star| is not below K - 1", {L});
  return L;
}

} // namespace iterfun

#endif // ITERFUN_CONDITIONS_HPP
