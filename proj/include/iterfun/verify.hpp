#ifndef ITERFUN_VERIFY_HPP
#define ITERFUN_VERIFY_HPP

// Residual |φ(φ(x)) − h(φ(f(x))) − g(x)| over probe points, and named
// invariant checks for grid and piecewise solutions.

#include "iterfun/errors.hpp"
#include "iterfun/funcspace.hpp"
#include "iterfun/piecewise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace iterfun {

struct ResidualReport {
  std::size_t probe_count = 0;
  std::size_t skipped = 0;  // probes needing φ outside a piecewise solution's range
  double sup_residual_interior = 0.0;
  double sup_residual_full = 0.0;
  double worst_x = std::numeric_limits<double>::quiet_NaN();
  double worst_x_interior = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 11> deciles{};  // residual quantiles at 0%, 10%, …, 100%
};

/// 4097 uniform points on [a, b] plus every extra point inside, sorted.
inline std::vector<double> default_probes(double a, double b, const std::vector<double>& extra = {},
                                          std::size_t n = 4097) {
  std::vector<double> pts = uniform_grid(a, b, n);
  for (double x : extra)
    if (x >= a && x <= b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Residual over probes; those in [interior_lo, interior_hi] also count
/// toward the interior supremum.
inline ResidualReport residual(const RealFn& phi, const RealFn& h, const RealFn& f, const RealFn& g,
                               const std::vector<double>& probes, double interior_lo,
                               double interior_hi) {
  ResidualReport r;
  r.probe_count = probes.size();
  std::vector<double> values;
  values.reserve(probes.size());
  for (double x : probes) {
    double res;
    try {
      res = std::fabs(phi(phi(x)) - h(phi(f(x))) - g(x));
    } catch (const DomainError&) {
      ++r.skipped;
      continue;
    }
    values.push_back(res);
    if (res > r.sup_residual_full || std::isnan(r.worst_x)) {
      r.sup_residual_full = res;
      r.worst_x = x;
    }
    if (x >= interior_lo && x <= interior_hi &&
        (res > r.sup_residual_interior || std::isnan(r.worst_x_interior))) {
      r.sup_residual_interior = res;
      r.worst_x_interior = x;
    }
  }
  if (!values.empty()) {
    std::sort(values.begin(), values.end());
    for (std::size_t d = 0; d <= 10; ++d) {
      const std::size_t idx = std::min(values.size() - 1, (values.size() - 1) * d / 10);
      r.deciles[d] = values[idx];
    }
  }
  return r;
}

inline ResidualReport residual(const RealFn& phi, const Expr& h, const Expr& f, const RealFn& g,
                               const std::vector<double>& probes, double interior_lo,
                               double interior_hi) {
  return residual(phi, [h](double x) { return eval(h, x); }, [f](double x) { return eval(f, x); },
                  g, probes, interior_lo, interior_hi);
}

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double limit = 0.0;  // threshold it was compared against
  std::optional<double> witness;
};

inline bool all_passed(const std::vector<CheckOutcome>& v) {
  return std::all_of(v.begin(), v.end(), [](const CheckOutcome& c) { return c.passed; });
}

struct GridCheckOptions {
  std::optional<double> L;      // Lipschitz budget; enables lipschitz-slope
  double slope_slack = 0.01;
  std::optional<double> kappa;  // asymptotic slope; enables tail-boundedness
};

/// lipschitz-slope: max segment slope ≤ L + slack.
/// tail-boundedness: max |φ − κx| over the outer half of the window stays
/// within twice the inner-half value (bounded deviation, not growth).
inline std::vector<CheckOutcome> check_invariants(const SampledFunction& phi,
                                                  const GridCheckOptions& opt) {
  std::vector<CheckOutcome> out;
  if (opt.L) {
    double s = 0.0, wx = phi.lo();
    const auto& x = phi.nodes();
    const auto& v = phi.values();
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double q = std::fabs((v[k + 1] - v[k]) / (x[k + 1] - x[k]));
      if (q > s) {
        s = q;
        wx = x[k];
      }
    }
    out.push_back({"lipschitz-slope", s <= *opt.L + opt.slope_slack, s, *opt.L + opt.slope_slack, wx});
  }
  if (opt.kappa) {
    const double half = 0.5 * std::max(std::fabs(phi.lo()), std::fabs(phi.hi()));
    double inner = 0.0, outer = 0.0, wx = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double x = phi.nodes()[i];
      const double d = std::fabs(phi.values()[i] - *opt.kappa * x);
      if (std::fabs(x) <= half) inner = std::max(inner, d);
      else if (d > outer) {
        outer = d;
        wx = x;
      }
    }
    const double limit = 2.0 * inner + 1e-9;
    out.push_back({"tail-boundedness", std::isfinite(outer) && outer <= limit, outer, limit, wx});
  }
  return out;
}

/// continuity, knot-order, forward-monotone, endpoint-identity, returnback
/// and conjunction for a piecewise solution. Backward branches are not
/// required to be monotone.
inline std::vector<CheckOutcome> check_invariants(const PiecewiseSolution& s) {
  const ConstructionProblem& p = s.problem();
  std::vector<CheckOutcome> out;

  // branch i−1 ends at x_i where branch i starts, on both sides of x₀
  double gap = 0.0;
  std::optional<double> gap_at;
  for (long i = s.min_index() + 1; i < static_cast<long>(s.forward_count()); ++i) {
    const double d = std::fabs(s.branch(i - 1).back() - s.branch(i).front());
    if (d > gap) {
      gap = d;
      gap_at = s.knot(i);
    }
  }
  out.push_back({"continuity", gap <= p.tau(1.0), gap, p.tau(1.0), gap_at});

  bool ordered = true;
  std::optional<double> bad_knot;
  for (long i = s.min_index(); i < s.max_index(); ++i)
    if (!(s.knot(i) < s.knot(i + 1))) {
      ordered = false;
      bad_knot = s.knot(i);
      break;
    }
  out.push_back({"knot-order", ordered, ordered ? 0.0 : 1.0, 0.0, bad_knot});

  std::optional<double> nonmono;
  for (long i = 0; i < static_cast<long>(s.forward_count()); ++i)
    if (s.branch(i).direction() != Direction::increasing) {
      nonmono = s.branch(i).lo();
      break;
    }
  out.push_back({"forward-monotone", !nonmono, nonmono ? 1.0 : 0.0, 0.0, nonmono});

  // defect j is φ_{j+2}(x_{j+2}) against x_{j+3}; reported as a fraction of its tolerance
  double worst = 0.0;
  std::optional<double> worst_at;
  for (std::size_t j = 0; j < s.endpoint_defects().size(); ++j) {
    const double knot = s.knot(static_cast<long>(j) + 3);
    const double ratio = s.endpoint_defects()[j] / p.tau(knot);
    if (ratio > worst) {
      worst = ratio;
      worst_at = s.knot(static_cast<long>(j) + 2);
    }
  }
  out.push_back({"endpoint-identity", worst <= 1.0, worst, 1.0, worst_at});

  double lowest = std::numeric_limits<double>::infinity();
  std::optional<double> low_at;
  for (long k = 1; k <= static_cast<long>(s.backward_count()); ++k) {
    const Branch& b = s.branch(-k);
    if (b.min_value() < lowest) {
      lowest = b.min_value();
      const auto it = std::min_element(b.values().begin(), b.values().end());
      low_at = b.nodes()[static_cast<std::size_t>(it - b.values().begin())];
    }
  }
  out.push_back({"returnback", s.backward_count() == 0 || lowest > p.xi0,
                 s.backward_count() ? lowest : p.xi0, p.xi0, low_at});

  // defect k is φ_{−k−1} against φ_{−k} at x_{−k}, as a fraction of its tolerance
  double cj = 0.0;
  std::optional<double> cj_at;
  for (std::size_t k = 0; k < s.conjunction_defects().size(); ++k) {
    const long i = -static_cast<long>(k);
    const double ratio = s.conjunction_defects()[k] / p.tau(s.branch(i).front());
    if (ratio > cj) {
      cj = ratio;
      cj_at = s.knot(i);
    }
  }
  out.push_back({"conjunction", cj <= 1.0, cj, 1.0, cj_at});
  return out;
}

} // namespace iterfun

#endif // ITERFUN_VERIFY_HPP
