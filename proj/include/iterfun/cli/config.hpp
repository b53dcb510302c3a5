#ifndef ITERFUN_CLI_CONFIG_HPP
#define ITERFUN_CLI_CONFIG_HPP

// Run configuration: flat key = value lines, optional [section] headers
// (ignored for lookup), '#' or ';' comments, values optionally quoted.

#include "iterfun/errors.hpp"

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

namespace iterfun::cli {

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error("usage-error", msg) {}
};

enum class Mode { check, solve_bounded, solve_compact, solve_asymptotic, construct, verify };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::check: return "check";
    case Mode::solve_bounded: return "solve-bounded";
    case Mode::solve_compact: return "solve-compact";
    case Mode::solve_asymptotic: return "solve-asymptotic";
    case Mode::construct: return "construct";
    case Mode::verify: return "verify";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "check" || s == "check-conditions") return Mode::check;
  if (s == "solve-bounded") return Mode::solve_bounded;
  if (s == "solve-compact") return Mode::solve_compact;
  if (s == "solve-asymptotic") return Mode::solve_asymptotic;
  if (s == "construct" || s == "construct-piecewise") return Mode::construct;
  if (s == "verify") return Mode::verify;
  throw UsageError("unknown mode '" + s + "'");
}

struct RunConfig {
  std::optional<Mode> mode;
  std::optional<std::string> h, f, g;
  std::optional<double> K, alpha, beta, kappa_h, kappa_f, kappa_g, L;
  double W = 20.0;
  std::size_t grid_n = 4001;
  double tol = 1e-8;
  std::size_t max_iter = 200;
  std::string interpolation = "akima";
  std::optional<std::pair<double, double>> interval;
  std::optional<double> x1, x2, X_target, X_target_neg;
  std::optional<std::string> seed_phi0, seed_phi1;
  std::optional<std::string> solution;  // verify: CSV written by a solve run
  std::string out = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

inline double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError(key + ": '" + v + "' is not a number");
  return out;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError(key + ": '" + v + "' is not a count");
  return out;
}

} // namespace detail

/// Applies one key/value pair; unknown keys are usage errors.
inline void set_field(RunConfig& c, const std::string& key, const std::string& raw) {
  using detail::to_count;
  using detail::to_double;
  const std::string v = detail::unquote(detail::trim(raw));
  if (key == "mode") c.mode = parse_mode(v);
  else if (key == "h") c.h = v;
  else if (key == "f") c.f = v;
  else if (key == "g") c.g = v;
  else if (key == "K") c.K = to_double(key, v);
  else if (key == "alpha") c.alpha = to_double(key, v);
  else if (key == "beta") c.beta = to_double(key, v);
  else if (key == "kappa_h") c.kappa_h = to_double(key, v);
  else if (key == "kappa_f") c.kappa_f = to_double(key, v);
  else if (key == "kappa_g") c.kappa_g = to_double(key, v);
  else if (key == "L") c.L = to_double(key, v);
  else if (key == "W" || key == "window") c.W = to_double(key, v);
  else if (key == "grid_n") c.grid_n = to_count(key, v);
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "max_iter") c.max_iter = to_count(key, v);
  else if (key == "interpolation") c.interpolation = v;
  else if (key == "interval") {
    std::istringstream in(v);
    std::string a, b, extra;
    if (!(in >> a >> b) || (in >> extra)) throw UsageError("interval: expected two numbers 'a b'");
    c.interval = std::pair{to_double(key, a), to_double(key, b)};
  } else if (key == "x1") c.x1 = to_double(key, v);
  else if (key == "x2") c.x2 = to_double(key, v);
  else if (key == "X_target") c.X_target = to_double(key, v);
  else if (key == "X_target_neg") c.X_target_neg = to_double(key, v);
  else if (key == "seed_phi0") c.seed_phi0 = v;
  else if (key == "seed_phi1") c.seed_phi1 = v;
  else if (key == "solution") c.solution = v;
  else if (key == "out") c.out = v;
  else throw UsageError("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& in, RunConfig c = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError("line " + std::to_string(lineno) + ": bad section header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("line " + std::to_string(lineno) + ": expected key = value");
    set_field(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  return parse_config(in, std::move(c));
}

/// Mode-specific required fields and basic ranges.
inline void validate(const RunConfig& c) {
  if (!c.mode) throw UsageError("mode required");
  const Mode m = *c.mode;
  if (!c.h) throw UsageError("h required");
  if (!c.f) throw UsageError("f required");
  if (!c.g) throw UsageError("g required");
  if (!(c.W > 0.0)) throw UsageError("window must be positive");
  if (c.grid_n < 3 || c.grid_n % 2 == 0) throw UsageError("grid_n must be odd and at least 3");
  if (!(c.tol > 0.0)) throw UsageError("tol must be positive");
  if (c.max_iter == 0) throw UsageError("max_iter must be positive");
  if (c.interpolation != "akima" && c.interpolation != "linear")
    throw UsageError("interpolation must be 'akima' or 'linear'");
  if (m == Mode::solve_compact) {
    if (!c.interval) throw UsageError("interval required");
    if (!(c.interval->first < c.interval->second)) throw UsageError("interval needs a < b");
  }
  if (m == Mode::construct && !c.x1) throw UsageError("x1 required");
  if (m == Mode::verify && !c.solution) throw UsageError("solution required");
}

} // namespace iterfun::cli

#endif // ITERFUN_CLI_CONFIG_HPP
