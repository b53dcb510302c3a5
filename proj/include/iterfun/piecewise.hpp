#ifndef ITERFUN_PIECEWISE_HPP
#define ITERFUN_PIECEWISE_HPP

// Explicit construction for increasing h, f, g with f(x) < x, g(x₁) = x₁,
// g(x) ≥ x on [x₁, ∞) and ξ₀ < x₁ ≤ f⁻¹(ξ₀), ξ₀ the zero of h.
//
// Knots x₀ = f(x₁) < x₁ < x₂ < x₃ = h(x₁) + x₁ and two seed homeomorphisms
// φ₀: [x₀,x₁] → [x₁,x₂], φ₁: [x₁,x₂] → [x₂,x₃] determine
//   forward   φ_{k+1}(x) = h(φ̃_k(f(φ_k⁻¹(x)))) + g(φ_k⁻¹(x)),  x_{k+3} = φ_{k+1}(x_{k+2})
//   backward  φ_{−k}(x)  = h⁻¹(φ*(φ_{−k+1}(f⁻¹(x))) − g(f⁻¹(x))), x_{−i} = fⁱ(x₀)
// where φ̃_k / φ* glue the forward branches, each owning [x_i, x_{i+1}).

#include "iterfun/errors.hpp"
#include "iterfun/exprlang.hpp"
#include "iterfun/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

struct PiecewiseOptions {
  std::optional<double> x2;            // default (x₁ + x₃)/2
  std::optional<double> X_target;      // default 50·max(1, |x₃|)
  std::optional<double> X_target_neg;  // default −X_target
  std::size_t sample_n = 4001;
  double tau_abs = 1e-9;
  double tau_rel = 1e-9;
  double density_divisor = 256.0;  // node spacing Δ = (x₃ − x₀)/divisor
  std::size_t min_nodes = 129;
  std::size_t uniform_cap = 4097;
  std::size_t node_cap = 16384;
  std::size_t max_branches = 2000;
};

struct ConstructionProblem {
  Expr h, f, g;
  NumericInverse h_inv;
  NumericInverse f_inv;
  double xi0;
  double x0, x1, x2, x3;
  double X_target;
  double X_target_neg;
  PiecewiseOptions options;

  double h_of(double x) const { return eval(h, x); }
  double f_of(double x) const { return eval(f, x); }
  double g_of(double x) const { return eval(g, x); }
  double tau(double v) const { return options.tau_abs + options.tau_rel * std::fabs(v); }
};

namespace detail {

inline void require_increasing(const char* name, const Expr& e, double lo, double hi, std::size_t n) {
  auto xs = uniform_grid(lo, hi, n);
  double prev = eval(e, xs[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = eval(e, xs[i]);
    if (!(cur > prev))
      throw HypothesisError("not-increasing",
                            std::string(name) + " is not strictly increasing near x = " +
                                std::to_string(xs[i]),
                            {xs[i - 1], xs[i]});
    prev = cur;
  }
}

} // namespace detail

/// Checks every hypothesis of the construction on sample_n points and fixes
/// the first knots. Failures name the hypothesis and carry a witness.
inline ConstructionProblem validate_hypotheses(const Expr& h, const Expr& f, const Expr& g, double x1,
                                       PiecewiseOptions opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.sample_n, 3);
  NumericInverse h_inv = NumericInverse::of(h);
  NumericInverse f_inv = NumericInverse::of(f);
  double xi0;
  try {
    xi0 = h_inv(0.0);
  } catch (const NotSurjectiveError&) {
    throw HypothesisError("zero-not-found", "h has no zero within 2^60 of the origin", {});
  }
  const double tau_x1 = opt.tau_abs + opt.tau_rel * std::fabs(x1);
  const double upper = f_inv(xi0, xi0);
  if (!(xi0 < x1) || x1 > upper + tau_x1)
    throw HypothesisError("x1-range",
                          "need xi0 < x1 <= f^-1(xi0); xi0 = " + std::to_string(xi0) +
                              ", f^-1(xi0) = " + std::to_string(upper),
                          {x1, xi0, upper});
  const double gx1 = eval(g, x1);
  if (std::fabs(gx1 - x1) > tau_x1)
    throw HypothesisError("fixed-point-mismatch",
                          "g(x1) = " + std::to_string(gx1) + " differs from x1", {x1, gx1});
  const double x0 = eval(f, x1);
  const double x3 = eval(h, x1) + x1;
  const double x2 = opt.x2 ? *opt.x2 : 0.5 * (x1 + x3);
  if (!(x1 < x2 && x2 < x3))
    throw HypothesisError("x2-range", "need x1 < x2 < h(x1) + x1 = " + std::to_string(x3), {x2});
  const double scale = std::max(1.0, std::fabs(x3));
  const double X_target = opt.X_target ? *opt.X_target : 50.0 * scale;
  const double X_neg =
      opt.X_target_neg ? *opt.X_target_neg : std::min(-X_target, x0 - 1.0);
  if (!(X_target > x3)) throw PreconditionError("X_target must exceed x3");
  if (!(X_neg < x0)) throw PreconditionError("X_target_neg must lie below x0");

  detail::require_increasing("h", h, X_neg, X_target, n);
  detail::require_increasing("f", f, X_neg, X_target, n);
  detail::require_increasing("g", g, X_neg, X_target, n);
  for (double x : uniform_grid(X_neg, X_target, n)) {
    const double fx = eval(f, x);
    if (!(fx < x))
      throw HypothesisError("f-above-diagonal", "f(x) >= x at x = " + std::to_string(x), {x, fx});
  }
  for (double x : uniform_grid(x1, X_target, n)) {
    const double gx = eval(g, x);
    if (gx < x - (opt.tau_abs + opt.tau_rel * std::fabs(x)))
      throw HypothesisError("g-below-diagonal", "g(x) < x at x = " + std::to_string(x), {x, gx});
  }
  return {h, f, g, std::move(h_inv), std::move(f_inv), xi0, x0, x1, x2, x3, X_target, X_neg, opt};
}

/// Endpoint-exact seed shapes; empty means affine.
struct SeedShapes {
  std::optional<Expr> phi0;
  std::optional<Expr> phi1;
};

namespace detail {

// shape evaluated on t ∈ [0, 1], rescaled so [lo, hi] maps onto [vlo, vhi]
inline Branch shaped_branch(const std::optional<Expr>& shape, double lo, double hi, double vlo,
                            double vhi, std::size_t n, const char* name) {
  if (!shape) return Branch({lo, hi}, {vlo, vhi});
  const double s0 = eval(*shape, 0.0), s1 = eval(*shape, 1.0);
  if (!(s1 > s0))
    throw PreconditionError("seed-error", std::string(name) + " shape is not increasing on [0, 1]");
  auto ts = uniform_grid(0.0, 1.0, n);
  std::vector<double> xs(n), vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * ts[i];
    vs[i] = vlo + (vhi - vlo) * ((eval(*shape, ts[i]) - s0) / (s1 - s0));
  }
  xs.front() = lo;
  xs.back() = hi;
  vs.front() = vlo;
  vs.back() = vhi;
  Branch b(std::move(xs), std::move(vs));
  if (b.direction() != Direction::increasing)
    throw PreconditionError("seed-error", std::string(name) + " shape is not strictly increasing");
  return b;
}

} // namespace detail

/// φ₀: [x₀,x₁] → [x₁,x₂] and φ₁: [x₁,x₂] → [x₂,x₃].
inline std::pair<Branch, Branch> seed_branches(const ConstructionProblem& p, const SeedShapes& shapes = {}) {
  const std::size_t n = std::max<std::size_t>(p.options.min_nodes, 3);
  return {detail::shaped_branch(shapes.phi0, p.x0, p.x1, p.x1, p.x2, n, "phi0"),
          detail::shaped_branch(shapes.phi1, p.x1, p.x2, p.x2, p.x3, n, "phi1")};
}

class PiecewiseSolution {
public:
  PiecewiseSolution(ConstructionProblem problem, Branch phi0, Branch phi1)
      : problem_(std::move(problem)) {
    if (phi0.direction() != Direction::increasing || phi1.direction() != Direction::increasing)
      throw PreconditionError("seed-error", "seed branches must be strictly increasing");
    const auto& p = problem_;
    auto off = [&](double got, double want) { return std::fabs(got - want) > p.tau(want); };
    if (off(phi0.lo(), p.x0) || off(phi0.hi(), p.x1) || off(phi0.front(), p.x1) ||
        off(phi0.back(), p.x2) || off(phi1.lo(), p.x1) || off(phi1.hi(), p.x2) ||
        off(phi1.front(), p.x2) || off(phi1.back(), p.x3))
      throw PreconditionError("seed-error", "seed branches do not match the knots x0..x3");
    fwd_knots_ = {p.x0, p.x1, p.x2, p.x3};
    fwd_.push_back(std::move(phi0));
    fwd_.push_back(std::move(phi1));
    for (const auto& b : fwd_) append_kinks(b);
  }

  const ConstructionProblem& problem() const { return problem_; }

  /// x_i for forward i ≥ 0 and backward i < 0.
  double knot(long i) const {
    if (i >= 0) return fwd_knots_.at(static_cast<std::size_t>(i));
    return bwd_knots_.at(static_cast<std::size_t>(-i - 1));
  }
  long min_index() const { return -static_cast<long>(bwd_knots_.size()); }
  long max_index() const { return static_cast<long>(fwd_knots_.size()) - 1; }

  const Branch& branch(long i) const {
    if (i >= 0) return fwd_.at(static_cast<std::size_t>(i));
    return bwd_.at(static_cast<std::size_t>(-i - 1));
  }
  std::size_t forward_count() const { return fwd_.size(); }
  std::size_t backward_count() const { return bwd_.size(); }

  /// Sorted knots x_{−m} … x_{n+2} (the last one is the image endpoint).
  std::vector<double> knots() const {
    std::vector<double> out(bwd_knots_.rbegin(), bwd_knots_.rend());
    out.insert(out.end(), fwd_knots_.begin(), fwd_knots_.end());
    return out;
  }

  double last_knot() const { return fwd_knots_.back(); }
  double lo() const { return bwd_.empty() ? fwd_knots_.front() : bwd_knots_.back(); }
  double hi() const { return fwd_.back().hi(); }
  bool contains(double x) const { return x >= lo() && x <= hi(); }

  /// Left-closed branch lookup; the final right endpoint belongs to the
  /// last forward branch.
  double operator()(double x) const {
    if (!contains(x))
      throw DomainError("out-of-range",
                        "x = " + std::to_string(x) + " outside the built range [" +
                            std::to_string(lo()) + ", " + std::to_string(hi()) + "]",
                        x);
    if (x >= fwd_knots_.front()) return eval_forward(x);
    // backward knots decrease: branch -k owns [x_{−k}, x_{−k+1})
    auto it = std::lower_bound(bwd_knots_.begin(), bwd_knots_.end(), x, std::greater<double>());
    const std::size_t k = static_cast<std::size_t>(it - bwd_knots_.begin());
    return bwd_[std::min(k, bwd_.size() - 1)](x);
  }

  /// φ* on [x₀, x_{n+1}].
  double eval_forward(double x) const {
    const double hi_end = fwd_.back().hi();
    if (x < fwd_knots_.front() || x > hi_end)
      throw DomainError("out-of-range", "forward part evaluated at " + std::to_string(x), x);
    auto it = std::upper_bound(fwd_knots_.begin(), fwd_knots_.begin() + fwd_.size(), x);
    std::size_t i = static_cast<std::size_t>(it - fwd_knots_.begin()) - 1;
    return fwd_[std::min(i, fwd_.size() - 1)](x);
  }

  const std::vector<double>& endpoint_defects() const { return endpoint_defects_; }
  const std::vector<double>& conjunction_defects() const { return conjunction_defects_; }
  std::size_t thinned_branches() const { return thinned_; }

private:
  friend void extend_forward_once(PiecewiseSolution&);
  friend void extend_backward_once(PiecewiseSolution&);

  // kink positions of a branch: endpoints plus nodes where the slope changes
  static std::vector<std::size_t> kink_indices(const Branch& b) {
    const auto& x = b.nodes();
    const auto& v = b.values();
    std::vector<std::size_t> out{0};
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double s1 = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
      const double s2 = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
      if (std::fabs(s1 - s2) > 1e-9 * std::max({std::fabs(s1), std::fabs(s2), 1e-300}))
        out.push_back(i);
    }
    out.push_back(x.size() - 1);
    return out;
  }

  void append_kinks(const Branch& b) {
    for (std::size_t i : kink_indices(b)) {
      const double x = b.nodes()[i];
      if (fwd_breaks_.empty() || x > fwd_breaks_.back()) fwd_breaks_.push_back(x);
    }
  }

  ConstructionProblem problem_;
  std::vector<double> fwd_knots_;  // x_0, x_1, …, x_{n+2}
  std::vector<Branch> fwd_;        // φ_0 … φ_n
  std::vector<double> bwd_knots_;  // x_{−1}, x_{−2}, …
  std::vector<Branch> bwd_;        // φ_{−1}, φ_{−2}, …
  std::vector<double> fwd_breaks_; // sorted kinks of the forward part
  std::vector<double> endpoint_defects_;
  std::vector<double> conjunction_defects_;
  std::size_t thinned_ = 0;
};

inline double eval_solution(const PiecewiseSolution& s, double x) { return s(x); }

namespace detail {

struct Candidate {
  double x;  // node of the new branch
  double u;  // its preimage under f⁻¹ or φ_k⁻¹, known exactly where possible
};

// Sort by x, drop near-duplicates (keeping the first, so exact pairs listed
// first win) and thin evenly to the cap, always keeping both ends.
inline std::vector<Candidate> settle(std::vector<Candidate> c, std::size_t cap, bool& thinned) {
  std::stable_sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return a.x < b.x; });
  std::vector<Candidate> out;
  out.reserve(c.size());
  for (const auto& k : c) {
    if (!out.empty() && k.x - out.back().x <= 1e-12 * std::max(1.0, std::fabs(k.x))) continue;
    out.push_back(k);
  }
  thinned = false;
  if (out.size() > cap && cap >= 2) {
    thinned = true;
    std::vector<Candidate> t;
    t.reserve(cap);
    const double step = static_cast<double>(out.size() - 1) / static_cast<double>(cap - 1);
    for (std::size_t j = 0; j < cap; ++j)
      t.push_back(out[std::min(out.size() - 1, static_cast<std::size_t>(std::llround(j * step)))]);
    out = std::move(t);
  }
  return out;
}

inline std::size_t uniform_count(const ConstructionProblem& p, double width) {
  const double delta = (p.x3 - p.x0) / p.options.density_divisor;
  const double want = std::ceil(width / delta) + 1.0;
  const double capped = std::min(want, static_cast<double>(p.options.uniform_cap));
  return std::max(p.options.min_nodes, static_cast<std::size_t>(capped));
}

} // namespace detail

/// Builds φ_{n+1} from the last forward branch φ_n.
inline void extend_forward_once(PiecewiseSolution& s) {
  const ConstructionProblem& p = s.problem_;
  if (s.fwd_.size() + s.bwd_.size() >= p.options.max_branches)
    throw ConstructionError("branch-cap", "branch cap reached while extending forward",
                            s.fwd_knots_.back());
  const Branch cur = s.fwd_.back();  // φ_k on [x_k, x_{k+1}]
  const double a = cur.front(), b = cur.back();
  std::vector<detail::Candidate> c;
  for (std::size_t i : PiecewiseSolution::kink_indices(cur))
    c.push_back({cur.values()[i], cur.nodes()[i]});
  // kinks of φ̃_k pulled back through f
  const double flo = p.f_of(cur.lo()), fhi = p.f_of(cur.hi());
  auto first = std::upper_bound(s.fwd_breaks_.begin(), s.fwd_breaks_.end(), flo);
  auto last = std::lower_bound(s.fwd_breaks_.begin(), s.fwd_breaks_.end(), fhi);
  for (auto it = first; it < last; ++it) {
    const double u = std::clamp(p.f_inv(*it, *it), cur.lo(), cur.hi());
    c.push_back({cur(u), u});
  }
  for (double x : uniform_grid(a, b, detail::uniform_count(p, b - a)))
    c.push_back({x, cur.inverse(x)});
  bool thinned = false;
  auto nodes = detail::settle(std::move(c), p.options.node_cap, thinned);
  if (thinned) ++s.thinned_;

  std::vector<double> xs(nodes.size()), vs(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double u = nodes[j].u;
    const double fu = std::max(p.f_of(u), s.fwd_knots_.front());
    xs[j] = nodes[j].x;
    vs[j] = p.h_of(s.eval_forward(fu)) + p.g_of(u);
  }
  // φ_{k+1}(x_{k+1}) must reproduce x_{k+2}
  const double defect = std::fabs(vs.front() - b);
  s.endpoint_defects_.push_back(defect);
  if (defect > p.tau(b))
    throw ConstructionError("endpoint-identity",
                            "new branch misses x_{k+2} by " + std::to_string(defect), a);
  vs.front() = b;
  Branch next(std::move(xs), std::move(vs));
  if (next.direction() != Direction::increasing)
    throw ConstructionError("not-increasing", "forward branch lost strict monotonicity", a);
  s.fwd_knots_.push_back(next.back());
  s.append_kinks(next);
  s.fwd_.push_back(std::move(next));
}

/// Forward branches until the last knot passes X_target.
inline void extend_forward(PiecewiseSolution& s, double X_target) {
  while (s.last_knot() <= X_target) extend_forward_once(s);
}

/// Builds φ_{−k} from φ_{−k+1} (φ₀ for k = 1), extending the forward part
/// first if φ_{−k+1} reaches beyond it.
inline void extend_backward_once(PiecewiseSolution& s) {
  const ConstructionProblem& p = s.problem_;
  const Branch prev = s.bwd_.empty() ? s.fwd_.front() : s.bwd_.back();
  if (prev.min_value() < s.fwd_knots_.front())
    throw DomainError("landing-below-x0",
                      "backward branch value " + std::to_string(prev.min_value()) + " below x0",
                      prev.min_value());
  while (prev.max_value() > s.fwd_.back().hi()) extend_forward_once(s);

  const double right = prev.lo();  // x_{−k+1}
  const double left = p.f_of(right);
  std::vector<detail::Candidate> c;
  for (std::size_t i : PiecewiseSolution::kink_indices(prev)) {
    const double t = prev.nodes()[i];
    c.push_back({p.f_of(t), t});
  }
  // points where φ_{−k+1}(u) crosses a kink of φ*
  const auto& pv = prev.values();
  const auto& px = prev.nodes();
  const auto& br = s.fwd_breaks_;
  for (std::size_t j = 0; j + 1 < pv.size(); ++j) {
    const double v0 = pv[j], v1 = pv[j + 1];
    if (v0 == v1) continue;
    auto it = std::upper_bound(br.begin(), br.end(), std::min(v0, v1));
    auto end = std::lower_bound(br.begin(), br.end(), std::max(v0, v1));
    for (; it < end; ++it) {
      const double t = px[j] + (*it - v0) / (v1 - v0) * (px[j + 1] - px[j]);
      c.push_back({p.f_of(t), t});
    }
  }
  for (double x : uniform_grid(left, right, detail::uniform_count(p, right - left)))
    c.push_back({x, std::clamp(p.f_inv(x, x), prev.lo(), prev.hi())});
  // exact endpoints first so they survive de-duplication
  c.insert(c.begin(), {{left, prev.lo()}, {right, prev.hi()}});
  bool thinned = false;
  auto nodes = detail::settle(std::move(c), p.options.node_cap, thinned);
  if (thinned) ++s.thinned_;

  std::vector<double> xs(nodes.size()), vs(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double u = nodes[j].u;
    const double y = s.eval_forward(prev(u)) - p.g_of(u);
    xs[j] = nodes[j].x;
    vs[j] = p.h_inv(y, y);
    if (!(vs[j] > p.xi0))
      throw ConstructionError("returnback",
                              "backward value " + std::to_string(vs[j]) + " not above xi0", xs[j]);
  }
  const double defect = std::fabs(vs.back() - prev.front());
  s.conjunction_defects_.push_back(defect);
  if (defect > p.tau(prev.front()))
    throw ConstructionError("conjunction", "adjacent branches disagree by " + std::to_string(defect),
                            right);
  vs.back() = prev.front();
  s.bwd_knots_.push_back(left);
  s.bwd_.emplace_back(std::move(xs), std::move(vs));
}

/// Backward branches until the leftmost knot drops below X_target_neg.
inline void extend_backward(PiecewiseSolution& s, double X_target_neg) {
  while (s.lo() >= X_target_neg) extend_backward_once(s);
}

/// Validated problem + seeds → forward to X_target, backward to X_target_neg.
inline PiecewiseSolution construct(const ConstructionProblem& p, const SeedShapes& shapes = {}) {
  auto [phi0, phi1] = seed_branches(p, shapes);
  PiecewiseSolution s(p, std::move(phi0), std::move(phi1));
  extend_forward(s, p.X_target);
  extend_backward(s, p.X_target_neg);
  return s;
}

} // namespace iterfun

#endif // ITERFUN_PIECEWISE_HPP
