// iterfun: check conditions, solve, construct and verify solutions of
// φ(φ(x)) = h(φ(f(x))) + g(x).

#include "iterfun/cli/run.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using iterfun::cli::RunConfig;

struct Flags {
  std::string config;
  std::string config_positional;
  std::optional<std::string> h, f, g, interpolation, seed_phi0, seed_phi1, solution, out;
  std::optional<double> K, alpha, beta, kappa_h, kappa_f, kappa_g, L, W, tol, x1, x2, X_target, X_target_neg;
  std::optional<std::size_t> grid_n, max_iter;
  std::vector<double> interval;
};

void add_flags(CLI::App& sub, Flags& fl, bool positional_config) {
  if (positional_config) sub.add_option("config_file", fl.config_positional, "run config file (key = value)");
  sub.add_option("-c,--config", fl.config, "run config file (key = value)");
  sub.add_option("--h", fl.h, "expression for h");
  sub.add_option("--f", fl.f, "expression for f");
  sub.add_option("--g", fl.g, "expression for g");
  sub.add_option("--K", fl.K, "certified expansion constant of h");
  sub.add_option("--alpha", fl.alpha, "certified expansion constant of f");
  sub.add_option("--beta", fl.beta, "certified Lipschitz constant of g");
  sub.add_option("--kappa-h", fl.kappa_h, "asymptotic slope of h");
  sub.add_option("--kappa-f", fl.kappa_f, "asymptotic slope of f");
  sub.add_option("--kappa-g", fl.kappa_g, "asymptotic slope of g");
  sub.add_option("--L", fl.L, "Lipschitz budget of the solution space");
  sub.add_option("--window", fl.W, "grid half-width W (grid is [-W, W])");
  sub.add_option("--grid-n", fl.grid_n, "grid points (odd, >= 3)");
  sub.add_option("--tol", fl.tol, "a-posteriori error tolerance");
  sub.add_option("--max-iter", fl.max_iter, "Picard iteration cap");
  sub.add_option("--interpolation", fl.interpolation, "akima or linear");
  sub.add_option("--interval", fl.interval, "compact interval a b")->expected(2);
  sub.add_option("--x1", fl.x1, "fixed point of g starting the construction");
  sub.add_option("--x2", fl.x2, "second seed knot");
  sub.add_option("--x-target", fl.X_target, "forward construction target");
  sub.add_option("--x-target-neg", fl.X_target_neg, "backward construction target");
  sub.add_option("--seed-phi0", fl.seed_phi0, "shape of the first seed on t in [0, 1]");
  sub.add_option("--seed-phi1", fl.seed_phi1, "shape of the second seed on t in [0, 1]");
  sub.add_option("--solution", fl.solution, "solution CSV to verify");
  sub.add_option("--out", fl.out, "output directory");
}

template <class T>
void over(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

RunConfig merge(const Flags& fl, std::optional<iterfun::cli::Mode> mode) {
  RunConfig c;
  if (!fl.config.empty() && !fl.config_positional.empty())
    throw iterfun::cli::UsageError("give the config file either positionally or via --config");
  const std::string& path = fl.config.empty() ? fl.config_positional : fl.config;
  if (!path.empty()) c = iterfun::cli::load_config(path);
  if (mode) c.mode = mode;
  over(c.h, fl.h);
  over(c.f, fl.f);
  over(c.g, fl.g);
  over(c.K, fl.K);
  over(c.alpha, fl.alpha);
  over(c.beta, fl.beta);
  over(c.kappa_h, fl.kappa_h);
  over(c.kappa_f, fl.kappa_f);
  over(c.kappa_g, fl.kappa_g);
  over(c.L, fl.L);
  over(c.x1, fl.x1);
  over(c.x2, fl.x2);
  over(c.X_target, fl.X_target);
  over(c.X_target_neg, fl.X_target_neg);
  over(c.seed_phi0, fl.seed_phi0);
  over(c.seed_phi1, fl.seed_phi1);
  over(c.solution, fl.solution);
  if (fl.W) c.W = *fl.W;
  if (fl.tol) c.tol = *fl.tol;
  if (fl.grid_n) c.grid_n = *fl.grid_n;
  if (fl.max_iter) c.max_iter = *fl.max_iter;
  if (fl.interpolation) c.interpolation = *fl.interpolation;
  if (fl.out) c.out = *fl.out;
  if (fl.interval.size() == 2) c.interval = std::pair{fl.interval[0], fl.interval[1]};
  return c;
}

} // namespace

int main(int argc, char** argv) {
  using iterfun::cli::Mode;
  CLI::App app{"Solver for the iterative functional equation phi(phi(x)) = h(phi(f(x))) + g(x)"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  Flags fl;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<Mode> mode;
  };
  const Sub subs[] = {
      {"check", "estimate constants and report which regimes apply", Mode::check},
      {"solve-bounded", "Picard iteration for bounded g", Mode::solve_bounded},
      {"solve-compact", "truncate g outside an interval, solve, restrict", Mode::solve_compact},
      {"solve-asymptotic", "Picard iteration around the line kappa_star x", Mode::solve_asymptotic},
      {"construct", "piecewise recursive construction from two seeds", Mode::construct},
      {"verify", "residual of a stored solution", Mode::verify},
      {"run", "run the mode named in the config file", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<Mode>>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_flags(*sub, fl, true);
    apps.emplace_back(sub, s.mode);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << iterfun::json{{"error", "usage-error"}, {"message", e.what()}, {"exit_code", 1}}.dump()
              << '\n';
    return iterfun::cli::exit_code::usage;
  }
  std::optional<Mode> mode;
  for (auto& [sub, m] : apps)
    if (sub->parsed()) mode = m;
  RunConfig cfg;
  try {
    cfg = merge(fl, mode);
  } catch (const iterfun::Error& e) {
    std::cerr << iterfun::cli::error_json(e).dump() << '\n';
    return iterfun::cli::exit_code_for(e);
  }
  return iterfun::cli::run_guarded(cfg);
}
