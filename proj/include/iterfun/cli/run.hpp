#ifndef ITERFUN_CLI_RUN_HPP
#define ITERFUN_CLI_RUN_HPP

// Dispatch of a RunConfig to the pipelines, artifact writing, and the
// error → exit-code contract:
//   0 success, 1 usage, 2 hypothesis failure, 3 non-convergence,
//   4 numerical failure inside a construction or evaluation.

#include "iterfun/cli/config.hpp"
#include "iterfun/conditions.hpp"
#include "iterfun/contraction.hpp"
#include "iterfun/exprlang.hpp"
#include "iterfun/piecewise.hpp"
#include "iterfun/report.hpp"
#include "iterfun/truncation.hpp"
#include "iterfun/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace iterfun::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int hypothesis = 2;
inline constexpr int non_convergence = 3;
inline constexpr int numerical = 4;
} // namespace exit_code

// ITERFUN_LOG: unset/"quiet" = errors only, "info", "debug".
inline int log_level() {
  const char* v = std::getenv("ITERFUN_LOG");
  if (!v) return 0;
  const std::string s = v;
  if (s == "debug" || s == "2") return 2;
  if (s == "info" || s == "1") return 1;
  return 0;
}

inline void log(int level, const std::string& msg, std::ostream& err = std::cerr) {
  if (level <= log_level())
    err << json{{"log", level >= 2 ? "debug" : "info"}, {"message", msg}}.dump() << '\n';
}

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ParseError*>(&e)) return exit_code::usage;
  if (dynamic_cast<const HypothesisError*>(&e) || dynamic_cast<const NotSurjectiveError*>(&e))
    return exit_code::hypothesis;
  if (dynamic_cast<const ConvergenceError*>(&e)) return exit_code::non_convergence;
  if (dynamic_cast<const PreconditionError*>(&e))
    return e.kind() == "not-monotone" ? exit_code::hypothesis : exit_code::usage;
  return exit_code::numerical;
}

/// Single-line JSON description of an error, with its witness data.
inline json error_json(const Error& e) {
  json j = {{"error", e.kind()}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
  if (auto* p = dynamic_cast<const ParseError*>(&e)) j["position"] = p->position();
  if (auto* p = dynamic_cast<const HypothesisError*>(&e)) {
    json w = json::array();
    for (double v : p->witness()) w.push_back(number_or_null(v));
    j["witness"] = w;
  }
  if (auto* p = dynamic_cast<const NotSurjectiveError*>(&e)) j["y"] = number_or_null(p->y());
  if (auto* p = dynamic_cast<const DomainError*>(&e)) j["x"] = number_or_null(p->x());
  if (auto* p = dynamic_cast<const EvalError*>(&e)) j["x"] = number_or_null(p->x());
  if (auto* p = dynamic_cast<const ConstructionError*>(&e)) j["x"] = number_or_null(p->x());
  if (auto* p = dynamic_cast<const ConvergenceError*>(&e)) {
    j["iterations"] = p->distances().size();
    if (!p->distances().empty()) j["last_distance"] = number_or_null(p->distances().back());
  }
  return j;
}

namespace detail {

inline Expr parse_field(const char* name, const std::string& src) {
  try {
    return parse(src);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), std::string(name) + ": " + e.detail(), e.position());
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + p.string() + "'");
  out << text;
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

inline std::string samples_csv(const char* column, const std::vector<double>& x,
                               const std::vector<double>& v) {
  std::string s = std::string("x,") + column + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) s += csv_number(x[i]) + "," + csv_number(v[i]) + "\n";
  return s;
}

inline std::string trace_csv(const PicardState& st) {
  std::string s = "iteration,distance,ratio\n";
  for (std::size_t i = 0; i < st.distances.size(); ++i) {
    s += std::to_string(i + 1) + "," + csv_number(st.distances[i]) + ",";
    if (i < st.contraction_ratios.size() && std::isfinite(st.contraction_ratios[i]))
      s += csv_number(st.contraction_ratios[i]);
    s += "\n";
  }
  return s;
}

inline json sidecar(double lo, double hi, const char* tail, double tail_slope, const char* interp,
                    double ilo, double ihi, std::optional<double> kappa = std::nullopt) {
  json j = {{"window", {lo, hi}},
            {"tail", {{"kind", tail}, {"slope", tail_slope}}},
            {"interpolation", interp},
            {"interior", {ilo, ihi}}};
  j["kappa"] = kappa ? json(*kappa) : json(nullptr);
  return j;
}

inline void write_sampled(const std::filesystem::path& dir, const SampledFunction& phi, double ilo,
                          double ihi, std::optional<double> kappa) {
  const bool lin = phi.tail().kind == TailKind::linear;
  write_text(dir / "solution.csv", samples_csv("value", phi.nodes(), phi.values()));
  write_json(dir / "solution.json",
             sidecar(phi.lo(), phi.hi(), lin ? "linear" : "constant", phi.tail().slope,
                     phi.interpolation() == Interpolation::akima ? "akima" : "linear", ilo, ihi, kappa));
}

inline json problem_json(const RunConfig& c) {
  return {{"h", *c.h}, {"f", *c.f}, {"g", *c.g}};
}

inline SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.W = c.W;
  o.grid_n = c.grid_n;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.interpolation = c.interpolation == "linear" ? Interpolation::linear : Interpolation::akima;
  return o;
}

inline bool has(const ConditionReport& r, const char* regime) {
  return std::find(r.applicable.begin(), r.applicable.end(), regime) != r.applicable.end();
}

inline double pick_L(const RunConfig& c, const ConditionReport& r, bool asymptotic) {
  if (!c.L) return default_L(r, asymptotic);
  if (!r.L_window || !r.L_window->contains(*c.L))
    throw HypothesisError("L-outside-window", "L = " + csv_number(*c.L) + " is outside the admissible window",
                          {*c.L});
  return *c.L;
}

inline ResidualReport grid_residual(const SampledFunction& phi, const FunctionalEquation& eq, double lo,
                                    double hi, double ilo, double ihi) {
  const RealFn fn = [&phi](double x) { return phi(x); };
  return residual(fn, eq.h, eq.f, eq.g, default_probes(lo, hi), ilo, ihi);
}

// Piecewise export covers branches starting at or below X_target.
inline long last_export_branch(const PiecewiseSolution& s) {
  long last = s.min_index();
  for (long i = s.min_index(); i < static_cast<long>(s.forward_count()); ++i)
    if (s.branch(i).lo() <= s.problem().X_target) last = i;
  return last;
}

inline void write_piecewise(const std::filesystem::path& dir, const PiecewiseSolution& s, long last) {
  std::vector<double> xs, vs;
  for (long i = s.min_index(); i <= last; ++i) {
    const Branch& b = s.branch(i);
    const std::size_t n = b.nodes().size() - (i == last ? 0 : 1);  // branches own their left end
    for (std::size_t k = 0; k < n; ++k) {
      xs.push_back(b.nodes()[k]);
      vs.push_back(b.values()[k]);
    }
  }
  write_text(dir / "solution.csv", samples_csv("phi", xs, vs));
  write_json(dir / "solution.json",
             sidecar(xs.front(), xs.back(), "none", 0.0, "linear", s.problem().x1, s.branch(last).lo()));
  write_json(dir / "knots.json", knots_json(s));
}

struct LoadedSolution {
  SampledFunction phi;
  bool bounded_domain;
  double ilo, ihi;
};

inline LoadedSolution load_solution(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw UsageError("cannot read solution '" + csv_path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "x,value" && line != "x,phi") throw UsageError("solution CSV header must be x,value or x,phi");
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw UsageError("malformed CSV line '" + line + "'");
    xs.push_back(iterfun::cli::detail::to_double("x", line.substr(0, comma)));
    vs.push_back(iterfun::cli::detail::to_double("value", line.substr(comma + 1)));
  }
  std::filesystem::path side = csv_path;
  side.replace_extension(".json");
  std::ifstream sin(side);
  if (!sin) throw UsageError("missing sidecar '" + side.string() + "'");
  json j;
  try {
    j = json::parse(sin);
  } catch (const json::exception& e) {
    throw UsageError("bad sidecar: " + std::string(e.what()));
  }
  const std::string tail = j.at("tail").at("kind");
  const double slope = j.at("tail").at("slope");
  const Interpolation interp = j.at("interpolation") == "akima" ? Interpolation::akima : Interpolation::linear;
  SampledFunction phi(std::move(xs), std::move(vs), tail == "linear" ? Tail::linear(slope) : Tail::constant(),
                      interp);
  return {std::move(phi), tail == "none", j.at("interior").at(0).get<double>(),
          j.at("interior").at(1).get<double>()};
}

} // namespace detail

/// Runs one configured pipeline and writes artifacts under c.out.
/// Library errors propagate; `run_guarded` maps them to exit codes.
inline int run(const RunConfig& c) {
  validate(c);
  const Mode mode = *c.mode;
  ProblemSpec spec;
  spec.h = detail::parse_field("h", *c.h);
  spec.f = detail::parse_field("f", *c.f);
  spec.g = detail::parse_field("g", *c.g);
  spec.K = c.K;
  spec.alpha = c.alpha;
  spec.beta = c.beta;
  spec.kappa_h = c.kappa_h;
  spec.kappa_f = c.kappa_f;
  spec.kappa_g = c.kappa_g;
  spec.W = c.W;
  spec.sample_n = c.grid_n;

  const std::filesystem::path dir = c.out;
  std::filesystem::create_directories(dir);
  json report = {{"mode", mode_name(mode)}, {"problem", detail::problem_json(c)}};
  const FunctionalEquation eq = FunctionalEquation::of(spec);

  if (mode == Mode::construct) {
    PiecewiseOptions po;
    po.x2 = c.x2;
    po.X_target = c.X_target;
    po.X_target_neg = c.X_target_neg;
    po.sample_n = c.grid_n;
    log(1, "validating construction hypotheses");
    ConstructionProblem p = validate_hypotheses(spec.h, spec.f, spec.g, *c.x1, po);
    SeedShapes shapes;
    if (c.seed_phi0) shapes.phi0 = detail::parse_field("seed_phi0", *c.seed_phi0);
    if (c.seed_phi1) shapes.phi1 = detail::parse_field("seed_phi1", *c.seed_phi1);
    log(1, "constructing branches");
    PiecewiseSolution s = construct(p, shapes);
    const long last = detail::last_export_branch(s);
    const double hi = s.branch(last).hi();
    const RealFn phi = [&s](double x) { return s(x); };
    auto res = residual(phi, spec.h, spec.f, eq.g, default_probes(s.lo(), hi, {}), p.x1, s.branch(last).lo());
    report["seeds"] = {{"phi0", c.seed_phi0 ? json(*c.seed_phi0) : json("affine")},
                       {"phi1", c.seed_phi1 ? json(*c.seed_phi1) : json("affine")}};
    report["piecewise"] = to_json(s);
    report["residual"] = to_json(res);
    report["checks"] = to_json(check_invariants(s));
    detail::write_piecewise(dir, s, last);
    detail::write_json(dir / "report.json", report);
    return exit_code::ok;
  }

  if (mode == Mode::verify) {
    auto sol = detail::load_solution(*c.solution);
    const SampledFunction& fn = sol.phi;
    const bool strict = sol.bounded_domain;
    const RealFn phi = [&fn, strict](double x) {
      if (strict && (x < fn.lo() || x > fn.hi())) throw DomainError("out-of-range", "outside the solution", x);
      return fn(x);
    };
    auto res = residual(phi, spec.h, spec.f, eq.g, default_probes(fn.lo(), fn.hi()), sol.ilo, sol.ihi);
    report["solution"] = *c.solution;
    report["residual"] = to_json(res);
    detail::write_json(dir / "report.json", report);
    return exit_code::ok;
  }

  log(1, "estimating constants");
  const ConditionReport cr = estimate_constants(spec);
  report["conditions"] = to_json(cr);
  if (mode == Mode::check) {
    detail::write_json(dir / "report.json", report);
    return exit_code::ok;
  }

  const SolveOptions opt = detail::solve_options(c);
  const double W = c.W;

  if (mode == Mode::solve_bounded) {
    if (!detail::has(cr, "bounded"))
      throw HypothesisError("hypothesis-violation",
                            cr.g_bounded ? "bounded-regime region condition fails"
                                         : "g is not bounded (nonzero linear growth)",
                            {});
    const double L = detail::pick_L(c, cr, false);
    log(1, "Picard iteration, L = " + csv_number(L));
    PicardState st = solve_bounded(eq, cr.K.value, L, opt);
    auto res = detail::grid_residual(st.iterate, eq, -W, W, -0.5 * W, 0.5 * W);
    report["picard"] = to_json(st);
    report["residual"] = to_json(res);
    // Reported only: nothing says two admissible budgets share one fixed point.
    const double L2 = 0.5 * (L + cr.L_window->hi);
    PicardState other = solve_bounded(eq, cr.K.value, L2, opt);
    report["cross_L"] = {{"L", L2},
                         {"iterations", other.iterations},
                         {"sup_distance", sup_distance(st.iterate, other.iterate)}};
    report["checks"] = to_json(check_invariants(st.iterate, {L, 0.01, std::nullopt}));
    detail::write_sampled(dir, st.iterate, -0.5 * W, 0.5 * W, std::nullopt);
    detail::write_text(dir / "trace.csv", detail::trace_csv(st));
    detail::write_json(dir / "report.json", report);
    return exit_code::ok;
  }

  if (mode == Mode::solve_asymptotic) {
    if (!detail::has(cr, "asymptotic"))
      throw HypothesisError("hypothesis-violation",
                            cr.kappa ? "asymptotic-regime conditions fail"
                                     : "asymptotic slopes unavailable or g has zero linear growth",
                            {});
    const double L = detail::pick_L(c, cr, true);
    const double ks = cr.kappa->star;
    log(1, "Picard iteration around kappa_star x, L = " + csv_number(L));
    PicardState st = solve_asymptotic(eq, cr.K.value, L, ks, opt);
    auto res = detail::grid_residual(st.iterate, eq, -W, W, -0.5 * W, 0.5 * W);
    report["picard"] = to_json(st);
    report["kappa_star"] = ks;
    report["max_deviation_from_line"] = max_deviation_from_line(st.iterate, ks, 0.5 * W);
    report["residual"] = to_json(res);
    report["checks"] = to_json(check_invariants(st.iterate, {L, 0.01, ks}));
    detail::write_sampled(dir, st.iterate, -0.5 * W, 0.5 * W, ks);
    detail::write_text(dir / "trace.csv", detail::trace_csv(st));
    detail::write_json(dir / "report.json", report);
    return exit_code::ok;
  }

  // solve-compact
  const auto [a, b] = *c.interval;
  log(1, "planning truncation");
  CompactSolution cs = solve_compact(eq, cr.K.value, cr.alpha.value, cr.beta.value, a, b, opt);
  const SampledFunction& full = cs.state.iterate;
  auto res = detail::grid_residual(full, eq, a, b, a, b);
  report["truncation"] = to_json(cs.plan);
  report["picard"] = to_json(cs.state);
  report["window"] = cs.options.W;
  report["residual"] = to_json(res);
  report["checks"] = to_json(check_invariants(full, {cs.L, 0.01, std::nullopt}));
  detail::write_sampled(dir, full, a, b, std::nullopt);
  detail::write_text(dir / "restricted.csv",
                     detail::samples_csv("value", cs.restricted.nodes(), cs.restricted.values()));
  detail::write_text(dir / "trace.csv", detail::trace_csv(cs.state));
  detail::write_json(dir / "report.json", report);
  return exit_code::ok;
}

/// run() with every error reported as one JSON line on `err`.
inline int run_guarded(const RunConfig& c, std::ostream& err = std::cerr) {
  try {
    return run(c);
  } catch (const Error& e) {
    err << error_json(e).dump() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << json{{"error", "io-error"}, {"message", e.what()}, {"exit_code", exit_code::usage}}.dump() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << json{{"error", "internal-error"}, {"message", e.what()}, {"exit_code", exit_code::numerical}}.dump()
        << '\n';
    return exit_code::numerical;
  }
}

} // namespace iterfun::cli

#endif // ITERFUN_CLI_RUN_HPP
