#ifndef ITERFUN_FUNCSPACE_HPP
#define ITERFUN_FUNCSPACE_HPP

// Grid functions with tail policies, monotone branches with inverses,
// numeric inversion of monotone expressions, sup distances and sampled
// Lipschitz estimates.

#include "iterfun/errors.hpp"
#include "iterfun/exprlang.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

using RealFn = std::function<double(double)>;

/// n points from a to b inclusive; endpoints are exact.
inline std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("uniform grid needs at least 2 points");
  std::vector<double> xs(n);
  const double span = b - a;
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = a + span * (static_cast<double>(i) / static_cast<double>(n - 1));
  xs.front() = a;
  xs.back() = b;
  return xs;
}

enum class TailKind { constant, linear };

/// Extension rule outside the node window: hold the endpoint value, or
/// continue with a fixed slope from the endpoint.
struct Tail {
  TailKind kind = TailKind::constant;
  double slope = 0.0;

  static Tail constant() { return {TailKind::constant, 0.0}; }
  static Tail linear(double k) { return {TailKind::linear, k}; }

  friend bool operator==(const Tail&, const Tail&) = default;
};

enum class Interpolation { linear, akima };

namespace detail {

// Akima derivatives, one-sided at clean kinks: when the secants on each
// side are locally constant but differ across the node, the left and right
// derivatives take the adjacent secant slopes so a kink survives.
inline void akima_derivatives(const std::vector<double>& x, const std::vector<double>& v,
                              std::vector<double>& left, std::vector<double>& right) {
  const std::size_t n = x.size();
  left.assign(n, 0.0);
  right.assign(n, 0.0);
  std::vector<double> m(n + 3);  // m[k + 2] is the secant slope of segment k, k = -2 .. n
  double scale = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m[k + 2] = (v[k + 1] - v[k]) / (x[k + 1] - x[k]);
    scale = std::max(scale, std::fabs(m[k + 2]));
  }
  m[1] = 2.0 * m[2] - m[3];
  m[0] = 2.0 * m[1] - m[2];
  m[n + 1] = 2.0 * m[n] - m[n - 1];
  m[n + 2] = 2.0 * m[n + 1] - m[n];
  const double eps = 1e-8 * std::max(1.0, scale);
  for (std::size_t i = 0; i < n; ++i) {
    const double mm2 = m[i], mm1 = m[i + 1], m0 = m[i + 2], mp1 = m[i + 3];
    const double w1 = std::fabs(mp1 - m0);
    const double w2 = std::fabs(mm1 - mm2);
    if (w1 <= eps && w2 <= eps && std::fabs(mm1 - m0) > eps) {
      left[i] = mm1;
      right[i] = m0;
      continue;
    }
    const double d = (w1 + w2 > 0.0) ? (w1 * mm1 + w2 * m0) / (w1 + w2) : 0.5 * (mm1 + m0);
    left[i] = right[i] = d;
  }
}

inline double hermite(double x0, double x1, double v0, double v1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * v0 + h10 * h * d0 + h01 * v1 + h11 * h * d1;
}

inline void check_nodes(const std::vector<double>& nodes, const std::vector<double>& values,
                        const char* what) {
  if (nodes.size() < 2) throw PreconditionError(std::string(what) + " needs at least 2 nodes");
  if (nodes.size() != values.size())
    throw PreconditionError(std::string(what) + ": nodes and values differ in length");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1]))
      throw PreconditionError(std::string(what) + ": nodes must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw PreconditionError(std::string(what) + ": non-finite value");
}

// Index k with nodes[k] <= x < nodes[k+1], clamped to [0, n-2].
inline std::size_t segment_of(const std::vector<double>& nodes, double x) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  return std::min(k, nodes.size() - 2);
}

} // namespace detail

/// A real function sampled on strictly increasing nodes, interpolated
/// between them and extended by a tail policy outside.
class SampledFunction {
public:
  SampledFunction(std::vector<double> nodes, std::vector<double> values, Tail tail = Tail::constant(),
                  Interpolation interp = Interpolation::linear)
      : nodes_(std::move(nodes)), values_(std::move(values)), tail_(tail), interp_(interp) {
    detail::check_nodes(nodes_, values_, "sampled function");
    // fewer than 3 nodes cannot carry Akima slopes; fall back to linear
    if (interp_ == Interpolation::akima && nodes_.size() < 3) interp_ = Interpolation::linear;
    if (interp_ == Interpolation::akima) detail::akima_derivatives(nodes_, values_, dleft_, dright_);
  }

  static SampledFunction from_fn(const std::vector<double>& nodes, const RealFn& fn,
                                 Tail tail = Tail::constant(),
                                 Interpolation interp = Interpolation::linear) {
    std::vector<double> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = fn(nodes[i]);
    return SampledFunction(nodes, std::move(vals), tail, interp);
  }

  double operator()(double x) const {
    const double lo = nodes_.front(), hi = nodes_.back();
    if (x < lo) return tail_.kind == TailKind::constant ? values_.front()
                                                        : values_.front() + tail_.slope * (x - lo);
    if (x > hi) return tail_.kind == TailKind::constant ? values_.back()
                                                        : values_.back() + tail_.slope * (x - hi);
    const std::size_t k = detail::segment_of(nodes_, x);
    const double x0 = nodes_[k], x1 = nodes_[k + 1];
    if (x == x0) return values_[k];
    if (x == x1) return values_[k + 1];
    if (interp_ == Interpolation::akima)
      return detail::hermite(x0, x1, values_[k], values_[k + 1], dright_[k], dleft_[k + 1], x);
    return values_[k] + (values_[k + 1] - values_[k]) * ((x - x0) / (x1 - x0));
  }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  const Tail& tail() const { return tail_; }
  Interpolation interpolation() const { return interp_; }
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  std::size_t size() const { return nodes_.size(); }

  SampledFunction with_values(std::vector<double> values) const {
    return SampledFunction(nodes_, std::move(values), tail_, interp_);
  }

  /// Largest |slope| over node segments (the Lipschitz constant of the
  /// piecewise linear interpolant).
  double max_segment_slope() const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k)
      s = std::max(s, std::fabs((values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k])));
    return s;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  Tail tail_;
  Interpolation interp_;
  std::vector<double> dleft_, dright_;
};

inline double eval_sampled(const SampledFunction& F, double x) { return F(x); }

/// Probe points refining both node sets: the merged nodes plus midpoints,
/// restricted to [a, b].
inline std::vector<double> refined_probes(const SampledFunction& F, const SampledFunction& G,
                                          double a, double b) {
  std::vector<double> pts;
  pts.reserve(2 * (F.size() + G.size()) + 2);
  for (double x : F.nodes()) if (x >= a && x <= b) pts.push_back(x);
  for (double x : G.nodes()) if (x >= a && x <= b) pts.push_back(x);
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i + 1 < n; ++i) pts.push_back(0.5 * (pts[i] + pts[i + 1]));
  std::sort(pts.begin(), pts.end());
  return pts;
}

/// max |F - G| over probes refining both node sets inside [a, b].
inline double sup_distance(const SampledFunction& F, const SampledFunction& G, double a, double b) {
  double d = 0.0;
  for (double x : refined_probes(F, G, a, b)) d = std::max(d, std::fabs(F(x) - G(x)));
  return d;
}

/// Same over the union of both windows.
inline double sup_distance(const SampledFunction& F, const SampledFunction& G) {
  return sup_distance(F, G, std::min(F.lo(), G.lo()), std::max(F.hi(), G.hi()));
}

struct LipschitzBounds {
  double lower;           // max divided difference over sampled pairs
  double upper_estimate;  // same number; heuristic, not a certified bound
  double witness_x = 0.0;
  double witness_y = 0.0;
};

/// Sampled divided differences on n uniform points. Adjacent pairs suffice:
/// any wider pair's quotient is a weighted mean of adjacent ones.
inline LipschitzBounds lipschitz_bounds(const RealFn& fn, double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("lipschitz_bounds needs n >= 2");
  auto xs = uniform_grid(a, b, n);
  LipschitzBounds out{0.0, 0.0, xs[0], xs[1]};
  double prev = fn(xs[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = fn(xs[i]);
    const double q = std::fabs((cur - prev) / (xs[i] - xs[i - 1]));
    if (q > out.lower) out = {q, q, xs[i - 1], xs[i]};
    prev = cur;
  }
  return out;
}

struct ExpansionBounds {
  double lower_quotient;  // min |divided difference| over sampled pairs
  double witness_x;
  double witness_y;
  bool monotone;          // sampled quotients never change sign
};

/// Smallest sampled |f(x)-f(y)|/|x-y|: an estimate from above of the
/// expansion constant. A sign change in adjacent quotients means the
/// function folds over, which makes the infimum zero.
inline ExpansionBounds expansion_bounds(const RealFn& fn, double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("expansion_bounds needs n >= 2");
  auto xs = uniform_grid(a, b, n);
  ExpansionBounds out{std::numeric_limits<double>::infinity(), xs[0], xs[1], true};
  double prev = fn(xs[0]);
  int sign = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = fn(xs[i]);
    const double q = (cur - prev) / (xs[i] - xs[i - 1]);
    const int s = q > 0 ? 1 : (q < 0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      out = {0.0, xs[i - 1], xs[i], false};
      return out;
    }
    sign = s;
    if (std::fabs(q) < out.lower_quotient) out = {std::fabs(q), xs[i - 1], xs[i], true};
    prev = cur;
  }
  return out;
}

/// Inverse of a strictly monotone function. Affine forwards use the closed
/// form; others bracket by doubling a radius around a hint and bisect.
class NumericInverse {
public:
  static constexpr double default_tolerance = 1e-12;
  static constexpr double expansion_limit = 1152921504606846976.0;  // 2^60

  NumericInverse(RealFn forward, double tolerance = default_tolerance)
      : forward_(std::move(forward)), tol_(tolerance) {}

  static NumericInverse of(const Expr& e, double tolerance = default_tolerance) {
    NumericInverse inv([e](double x) { return eval(e, x); }, tolerance);
    inv.affine_ = affine_pattern(e);
    if (inv.affine_ && inv.affine_->slope == 0.0)
      throw PreconditionError("constant expression " + to_string(e) + " is not invertible");
    return inv;
  }

  /// Restrict the search to a known enclosing interval first.
  NumericInverse& with_bracket(double lo, double hi) {
    bracket_ = std::make_pair(lo, hi);
    return *this;
  }

  double tolerance() const { return tol_; }
  const std::optional<Affine>& affine() const { return affine_; }
  double forward(double x) const { return forward_(x); }

  double operator()(double y, double hint = 0.0) const {
    if (affine_) return (y - affine_->intercept) / affine_->slope;
    double lo, hi, flo, fhi;
    if (bracket_ && encloses(bracket_->first, bracket_->second, y, flo, fhi)) {
      lo = bracket_->first;
      hi = bracket_->second;
    } else {
      bool found = false;
      for (double r = 1.0; r <= expansion_limit; r *= 2.0) {
        lo = hint - r;
        hi = hint + r;
        try {
          if (encloses(lo, hi, y, flo, fhi)) {
            found = true;
            break;
          }
        } catch (const EvalError&) {
          break;
        }
      }
      if (!found)
        throw NotSurjectiveError("no preimage of " + std::to_string(y) +
                                     " within radius 2^60 of the hint",
                                 y);
    }
    check_monotone(lo, hi, flo, fhi);
    return bisect(lo, hi, flo, fhi, y);
  }

private:
  bool encloses(double lo, double hi, double y, double& flo, double& fhi) const {
    flo = forward_(lo);
    fhi = forward_(hi);
    return (flo - y) * (fhi - y) <= 0.0;
  }

  void check_monotone(double lo, double hi, double flo, double fhi) const {
    constexpr int samples = 32;
    const bool up = fhi > flo;
    double prev = flo;
    for (int i = 1; i <= samples; ++i) {
      const double x = i == samples ? hi : lo + (hi - lo) * i / samples;
      const double cur = i == samples ? fhi : forward_(x);
      // equal neighbours are roundoff plateaus; only a reversal counts
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max({1.0, std::fabs(cur), std::fabs(prev)});
      if (up ? cur < prev - slack : cur > prev + slack)
        throw PreconditionError("not-monotone",
                                "forward map is not strictly monotone near x = " + std::to_string(x));
      prev = cur;
    }
  }

  double bisect(double lo, double hi, double flo, double fhi, double y) const {
    const double target = tol_ * std::max(1.0, std::fabs(y));
    if (std::fabs(flo - y) <= target) return lo;
    if (std::fabs(fhi - y) <= target) return hi;
    const bool up = fhi > flo;
    double best = lo, best_err = std::fabs(flo - y);
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = forward_(mid);
      const double err = std::fabs(fm - y);
      if (err < best_err) {
        best = mid;
        best_err = err;
      }
      if (err <= target) return mid;
      if ((fm < y) == up)
        lo = mid;
      else
        hi = mid;
    }
    return best;
  }

  RealFn forward_;
  double tol_;
  std::optional<Affine> affine_;
  std::optional<std::pair<double, double>> bracket_;
};

inline double invert_monotone(const NumericInverse& inv, double y) { return inv(y); }

enum class Direction { increasing, decreasing, non_monotone };

inline const char* direction_name(Direction d) {
  switch (d) {
  case Direction::increasing: return "increasing";
  case Direction::decreasing: return "decreasing";
  default: return "non_monotone";
  }
}

/// A continuous map on [a, b] stored as a piecewise linear node table.
/// Monotone branches are inverted by node bisection plus a linear solve on
/// the bracketing segment.
class Branch {
public:
  Branch(std::vector<double> nodes, std::vector<double> values)
      : nodes_(std::move(nodes)), values_(std::move(values)) {
    detail::check_nodes(nodes_, values_, "branch");
    bool inc = true, dec = true;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      inc = inc && values_[i] < values_[i + 1];
      dec = dec && values_[i] > values_[i + 1];
    }
    dir_ = inc ? Direction::increasing : dec ? Direction::decreasing : Direction::non_monotone;
    auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
    vmin_ = *mn;
    vmax_ = *mx;
  }

  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  double min_value() const { return vmin_; }
  double max_value() const { return vmax_; }
  Direction direction() const { return dir_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

  bool contains(double x) const { return x >= lo() && x <= hi(); }

  double operator()(double x) const {
    if (!contains(x))
      throw DomainError("branch evaluated at " + std::to_string(x) + " outside [" +
                            std::to_string(lo()) + ", " + std::to_string(hi()) + "]",
                        x);
    const std::size_t k = detail::segment_of(nodes_, x);
    const double x0 = nodes_[k], x1 = nodes_[k + 1];
    if (x == x0) return values_[k];
    if (x == x1) return values_[k + 1];
    return values_[k] + (values_[k + 1] - values_[k]) * ((x - x0) / (x1 - x0));
  }

  double inverse(double y) const {
    if (dir_ == Direction::non_monotone)
      throw PreconditionError("inverse of a non-monotone branch");
    if (y < vmin_ || y > vmax_)
      throw DomainError("branch inverse at " + std::to_string(y) + " outside its range", y);
    const bool up = dir_ == Direction::increasing;
    std::size_t lo = 0, hi = values_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if ((values_[mid] <= y) == up)
        lo = mid;
      else
        hi = mid;
    }
    if (values_[lo] == y) return nodes_[lo];
    if (values_[hi] == y) return nodes_[hi];
    const double t = (y - values_[lo]) / (values_[hi] - values_[lo]);
    return nodes_[lo] + t * (nodes_[hi] - nodes_[lo]);
  }

  /// Preimages of y on every segment whose value range contains y.
  std::vector<double> preimages(double y) const {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
      const double a = values_[k], b = values_[k + 1];
      if ((y >= std::min(a, b)) && (y <= std::max(a, b)) && a != b) {
        const double t = (y - a) / (b - a);
        out.push_back(nodes_[k] + t * (nodes_[k + 1] - nodes_[k]));
      }
    }
    return out;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  Direction dir_;
  double vmin_ = 0.0, vmax_ = 0.0;
};

} // namespace iterfun

#endif // ITERFUN_FUNCSPACE_HPP
