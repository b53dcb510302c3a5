#ifndef ITERFUN_REPORT_HPP
#define ITERFUN_REPORT_HPP

// JSON views of reports and solutions, and round-trip-safe CSV numbers.

#include "iterfun/conditions.hpp"
#include "iterfun/contraction.hpp"
#include "iterfun/piecewise.hpp"
#include "iterfun/truncation.hpp"
#include "iterfun/verify.hpp"

#include "json.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace iterfun {

using json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal point, independent of locale.
inline std::string csv_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), ptr);
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Constant& c) { return {{"value", c.value}, {"source", source_name(c.source)}}; }

inline json to_json(const std::optional<Constant>& c) { return c ? to_json(*c) : json(nullptr); }

inline json to_json(const ConditionReport& r) {
  const double K = r.K.value, a = r.alpha.value, b = r.beta.value;
  const double thr = r.bounded_region.alpha_threshold;
  const double quarter = 0.25 * a * a * K * K;
  json regions = {
      {"alpha_threshold", thr},
      {"quarter_square_bound", a < thr && b <= quarter},
      {"contraction_gap_bound", a >= thr && b < (K - 1.0) * (a * K - K + 1.0)},
      {"quarter_square_bound_strict", a < thr && b < quarter},
      {"bounded_region", r.bounded_region.holds},
      {"compact_region", r.compact_region.holds},
  };
  json out = {
      {"constants",
       {{"K", to_json(r.K)},
        {"alpha", to_json(r.alpha)},
        {"beta", to_json(r.beta)},
        {"kappa_h", to_json(r.kappa_h)},
        {"kappa_f", to_json(r.kappa_f)},
        {"kappa_g", to_json(r.kappa_g)}}},
      {"g_bounded", r.g_bounded},
      {"regions", regions},
      {"L_window", r.L_window ? json::array({r.L_window->lo, r.L_window->hi}) : json(nullptr)},
      {"L_window_empty", !r.L_window || r.L_window->empty()},
      {"kappa_roots", r.kappa ? json::array({r.kappa->k1, r.kappa->k2}) : json(nullptr)},
      {"kappa_star", r.kappa ? json(r.kappa->star) : json(nullptr)},
      {"applicable", r.applicable},
      {"heuristic_constants", r.has_heuristic()},
      {"warnings", r.warnings},
  };
  return out;
}

inline json to_json(const PicardState& s) {
  json d = json::array(), q = json::array();
  for (double v : s.distances) d.push_back(v);
  for (double v : s.contraction_ratios) q.push_back(number_or_null(v));
  return {{"iterations", s.iterations}, {"converged", s.converged}, {"L", s.L},
          {"contraction_factor", s.q}, {"distances", d}, {"contraction_ratios", q}};
}

inline json to_json(const TruncationPlan& p) {
  return {{"interval", {p.a, p.b}},      {"omega", p.omega},
          {"ladder_step", p.ladder_step}, {"beta", p.beta},
          {"beta_tilde", p.beta_tilde},   {"region", region_name(p.region.which)},
          {"beta_limit", p.region.beta_limit}, {"margin", p.margin},
          {"feasible", p.feasible}};
}

inline json to_json(const ResidualReport& r) {
  json dec = json::array();
  for (double v : r.deciles) dec.push_back(v);
  return {{"probe_count", r.probe_count},
          {"skipped", r.skipped},
          {"sup_residual_interior", r.sup_residual_interior},
          {"sup_residual_full", r.sup_residual_full},
          {"worst_x", number_or_null(r.worst_x)},
          {"worst_x_interior", number_or_null(r.worst_x_interior)},
          {"deciles", dec}};
}

inline json to_json(const std::vector<CheckOutcome>& v) {
  json out = json::array();
  for (const auto& c : v)
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", number_or_null(c.value)},
                   {"limit", number_or_null(c.limit)},
                   {"witness", c.witness ? number_or_null(*c.witness) : json(nullptr)}});
  return out;
}

inline json knots_json(const PiecewiseSolution& s) {
  json k = json::array();
  for (double x : s.knots()) k.push_back(x);
  return k;
}

inline json to_json(const PiecewiseSolution& s) {
  const ConstructionProblem& p = s.problem();
  double ep = 0.0, cj = 0.0;
  for (double d : s.endpoint_defects()) ep = std::max(ep, d);
  for (double d : s.conjunction_defects()) cj = std::max(cj, d);
  std::size_t nodes = 0;
  for (long i = s.min_index(); i < static_cast<long>(s.forward_count()); ++i)
    nodes += s.branch(i).nodes().size();
  return {{"xi0", p.xi0},
          {"x0", p.x0},
          {"x1", p.x1},
          {"x2", p.x2},
          {"x3", p.x3},
          {"X_target", p.X_target},
          {"X_target_neg", p.X_target_neg},
          {"forward_branches", s.forward_count()},
          {"backward_branches", s.backward_count()},
          {"built_range", {s.lo(), s.hi()}},
          {"total_nodes", nodes},
          {"thinned_branches", s.thinned_branches()},
          {"endpoint_defect_max", ep},
          {"conjunction_defect_max", cj},
          {"first_knots", [&] {
             json k = json::array();
             for (long i = s.min_index(); i <= std::min<long>(s.max_index(), s.min_index() + 12); ++i)
               k.push_back(s.knot(i));
             return k;
           }()}};
}

} // namespace iterfun

#endif // ITERFUN_REPORT_HPP
