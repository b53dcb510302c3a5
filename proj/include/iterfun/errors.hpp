#ifndef ITERFUN_ERRORS_HPP
#define ITERFUN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iterfun {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag; the CLI maps it onto exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Lexical or syntax error in an expression string.
class ParseError : public Error {
public:
  ParseError(std::string kind, const std::string& message, std::size_t position)
      : Error(std::move(kind), message + " at offset " + std::to_string(position)),
        detail_(message), position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// Message without the offset suffix.
  const std::string& detail() const noexcept { return detail_; }

private:
  std::string detail_;
  std::size_t position_;
};

class EvalError : public Error {
public:
  EvalError(const std::string& message, double x)
      : Error("evaluation-error", message), x_(x) {}

  double x() const noexcept { return x_; }

private:
  double x_;
};

/// A caller-side contract was violated (bad argument, undeclared monotonicity, ...).
class PreconditionError : public Error {
public:
  explicit PreconditionError(const std::string& message)
      : Error("precondition", message) {}
  PreconditionError(std::string kind, const std::string& message)
      : Error(std::move(kind), message) {}
};

/// A mathematical hypothesis of one of the existence results fails,
/// with the sampled point(s) that witness the failure.
class HypothesisError : public Error {
public:
  HypothesisError(std::string kind, const std::string& message, std::vector<double> witness)
      : Error(std::move(kind), message), witness_(std::move(witness)) {}

  const std::vector<double>& witness() const noexcept { return witness_; }

private:
  std::vector<double> witness_;
};

/// The numeric inverse could not bracket the target value.
class NotSurjectiveError : public Error {
public:
  NotSurjectiveError(const std::string& message, double y)
      : Error("not-surjective", message), y_(y) {}

  double y() const noexcept { return y_; }

private:
  double y_;
};

/// Evaluation requested outside the range a function was built on.
class DomainError : public Error {
public:
  DomainError(const std::string& message, double x) : Error("domain-error", message), x_(x) {}
  DomainError(std::string kind, const std::string& message, double x)
      : Error(std::move(kind), message), x_(x) {}

  double x() const noexcept { return x_; }

private:
  double x_;
};

/// Picard iteration hit its iteration cap. Carries the distance trace.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& message, std::vector<double> distances)
      : Error("non-convergence", message), distances_(std::move(distances)) {}

  const std::vector<double>& distances() const noexcept { return distances_; }

private:
  std::vector<double> distances_;
};

/// An internal consistency check of the piecewise construction failed.
/// This indicates lost precision rather than a mathematical failure.
class ConstructionError : public Error {
public:
  ConstructionError(std::string kind, const std::string& message, double x)
      : Error(std::move(kind), message), x_(x) {}

  double x() const noexcept { return x_; }

private:
  double x_;
};

} // namespace iterfun

#endif // ITERFUN_ERRORS_HPP
