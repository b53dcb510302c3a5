#ifndef ITERFUN_EXPRLANG_HPP
#define ITERFUN_EXPRLANG_HPP

// Univariate real expressions: tokenizer, recursive-descent parser with
// constant folding, evaluator, printer and a few structural analyses.
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          exponent must fold to a constant
//   primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | abs | sqrt | atan

#include "iterfun/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace iterfun {

enum class TokenKind { number, identifier, op, left_paren, right_paren, comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;
  double number = 0.0;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

} // namespace detail

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (detail::is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (detail::is_digit(c) || (c == '.' && i + 1 < n && detail::is_digit(src[i + 1]))) {
      while (i < n && detail::is_digit(src[i])) ++i;
      if (i < n && src[i] == '.') {
        ++i;
        while (i < n && detail::is_digit(src[i])) ++i;
      }
      // exponent only when digits follow, so "2e" lexes as 2 then identifier e
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && detail::is_digit(src[j])) {
          i = j;
          while (i < n && detail::is_digit(src[i])) ++i;
        }
      }
      Token t{TokenKind::number, std::string(src.substr(start, i - start)), start};
      auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(),
                                       t.number);
      if (ec != std::errc{} || ptr != t.lexeme.data() + t.lexeme.size())
        throw ParseError("lexical-error", "malformed number '" + t.lexeme + "'", start);
      out.push_back(std::move(t));
    } else if (detail::is_ident_start(c)) {
      while (i < n && (detail::is_ident_start(src[i]) || detail::is_digit(src[i]))) ++i;
      out.push_back({TokenKind::identifier, std::string(src.substr(start, i - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      out.push_back({TokenKind::op, std::string(1, c), start});
      ++i;
    } else if (c == '(') {
      out.push_back({TokenKind::left_paren, "(", start});
      ++i;
    } else if (c == ')') {
      out.push_back({TokenKind::right_paren, ")", start});
      ++i;
    } else if (c == ',') {
      out.push_back({TokenKind::comma, ",", start});
      ++i;
    } else {
      throw ParseError("lexical-error", std::string("unexpected character '") + c + "'", start);
    }
  }
  return out;
}

enum class NodeKind { constant, variable, negate, add, sub, mul, div, pow, call };
enum class Function { sin, cos, exp, abs, sqrt, atan };

inline std::string_view function_name(Function f) {
  constexpr std::array<std::string_view, 6> names{"sin", "cos", "exp", "abs", "sqrt", "atan"};
  return names[static_cast<std::size_t>(f)];
}

inline std::optional<Function> function_from_name(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    auto f = static_cast<Function>(i);
    if (function_name(f) == name) return f;
  }
  return std::nullopt;
}

/// Immutable expression tree in the single free variable x. Copies share
/// structure.
class Expr {
public:
  static Expr constant(double v) { return Expr(make(NodeKind::constant, v, {}, {})); }
  static Expr variable() { return Expr(make(NodeKind::variable, 0.0, {}, {})); }
  static Expr negate(Expr a) { return Expr(make(NodeKind::negate, 0.0, {}, {std::move(a)})); }
  static Expr binary(NodeKind op, Expr a, Expr b) {
    return Expr(make(op, 0.0, {}, {std::move(a), std::move(b)}));
  }
  static Expr call(Function fn, Expr a) { return Expr(make(NodeKind::call, 0.0, fn, {std::move(a)})); }

  NodeKind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  Function function() const { return node_->fn; }
  std::size_t arity() const { return node_->children.size(); }
  const Expr& child(std::size_t i) const { return node_->children.at(i); }
  bool is_constant() const { return node_->kind == NodeKind::constant; }

  double operator()(double x) const;

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
    if (a.kind() == NodeKind::constant && a.value() != b.value()) return false;
    if (a.kind() == NodeKind::call && a.function() != b.function()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!(a.child(i) == b.child(i))) return false;
    return true;
  }

private:
  struct Node {
    NodeKind kind;
    double value;
    Function fn;
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(NodeKind k, double v, Function fn, std::vector<Expr> ch) {
    return std::make_shared<const Node>(Node{k, v, fn, std::move(ch)});
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline double apply_function(Function fn, double a) {
  switch (fn) {
  case Function::sin: return std::sin(a);
  case Function::cos: return std::cos(a);
  case Function::exp: return std::exp(a);
  case Function::abs: return std::fabs(a);
  case Function::sqrt: return std::sqrt(a);
  case Function::atan: return std::atan(a);
  }
  return a;
}

inline double apply_binary(NodeKind k, double a, double b) {
  switch (k) {
  case NodeKind::add: return a + b;
  case NodeKind::sub: return a - b;
  case NodeKind::mul: return a * b;
  case NodeKind::div: return a / b;
  case NodeKind::pow: return std::pow(a, b);
  default: return a;
  }
}

inline double eval_node(const Expr& e, double x) {
  double r = 0.0;
  switch (e.kind()) {
  case NodeKind::constant: return e.value();
  case NodeKind::variable: return x;
  case NodeKind::negate: r = -eval_node(e.child(0), x); break;
  case NodeKind::call: r = apply_function(e.function(), eval_node(e.child(0), x)); break;
  default: r = apply_binary(e.kind(), eval_node(e.child(0), x), eval_node(e.child(1), x)); break;
  }
  if (!std::isfinite(r)) throw EvalError("non-finite result at x = " + std::to_string(x), x);
  return r;
}

} // namespace detail

/// IEEE double evaluation. Any non-finite intermediate raises EvalError.
inline double eval(const Expr& e, double x) { return detail::eval_node(e, x); }

inline double Expr::operator()(double x) const { return eval(*this, x); }

struct ParseOptions {
  bool fold_constants = true;
};

namespace detail {

class Parser {
public:
  Parser(std::string_view src, ParseOptions opts)
      : tokens_(tokenize(src)), end_pos_(src.size()), opts_(opts) {}

  Expr run() {
    Expr e = expr();
    if (pos_ < tokens_.size())
      throw ParseError("syntax-error", "unexpected '" + tokens_[pos_].lexeme + "'",
                       tokens_[pos_].position);
    return e;
  }

private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  std::size_t here() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_pos_; }

  bool accept_op(char c) {
    const Token* t = peek();
    if (t && t->kind == TokenKind::op && t->lexeme[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(TokenKind k, const char* what) {
    const Token* t = peek();
    if (!t || t->kind != k)
      throw ParseError("syntax-error", std::string("expected ") + what, here());
    ++pos_;
  }

  Expr fold(Expr e) const {
    if (!opts_.fold_constants) return e;
    for (std::size_t i = 0; i < e.arity(); ++i)
      if (!e.child(i).is_constant()) return e;
    double v = 0.0;
    switch (e.kind()) {
    case NodeKind::constant:
    case NodeKind::variable: return e;
    case NodeKind::negate: v = -e.child(0).value(); break;
    case NodeKind::call: v = apply_function(e.function(), e.child(0).value()); break;
    default: v = apply_binary(e.kind(), e.child(0).value(), e.child(1).value()); break;
    }
    // leave non-finite subtrees alone so the error surfaces at evaluation
    if (!std::isfinite(v)) return e;
    return Expr::constant(v);
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept_op('+'))
        lhs = fold(Expr::binary(NodeKind::add, lhs, term()));
      else if (accept_op('-'))
        lhs = fold(Expr::binary(NodeKind::sub, lhs, term()));
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept_op('*'))
        lhs = fold(Expr::binary(NodeKind::mul, lhs, unary()));
      else if (accept_op('/'))
        lhs = fold(Expr::binary(NodeKind::div, lhs, unary()));
      else
        return lhs;
    }
  }

  Expr unary() {
    if (accept_op('-')) return fold(Expr::negate(unary()));
    if (accept_op('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    const std::size_t caret = here();
    if (accept_op('^')) {
      Expr exponent = unary();
      Expr folded = opts_.fold_constants ? exponent : Parser::force_fold(exponent);
      if (!folded.is_constant())
        throw ParseError("non-constant-exponent", "exponent of '^' must be a constant", caret);
      return fold(Expr::binary(NodeKind::pow, base, exponent));
    }
    return base;
  }

  // Exponent constness is checked on the folded form even when folding is off.
  static Expr force_fold(const Expr& e) {
    return Parser("", ParseOptions{true}).refold(e);
  }

  Expr refold(const Expr& e) const {
    if (e.arity() == 0) return e;
    if (e.kind() == NodeKind::negate) return fold(Expr::negate(refold(e.child(0))));
    if (e.kind() == NodeKind::call) return fold(Expr::call(e.function(), refold(e.child(0))));
    return fold(Expr::binary(e.kind(), refold(e.child(0)), refold(e.child(1))));
  }

  Expr primary() {
    const Token* t = peek();
    if (!t) throw ParseError("syntax-error", "unexpected end of input", end_pos_);
    switch (t->kind) {
    case TokenKind::number:
      ++pos_;
      return Expr::constant(t->number);
    case TokenKind::left_paren: {
      ++pos_;
      Expr inner = expr();
      expect(TokenKind::right_paren, "')'");
      return inner;
    }
    case TokenKind::identifier: {
      const std::size_t at = t->position;
      std::string name = t->lexeme;
      ++pos_;
      if (name == "x") return Expr::variable();
      if (name == "pi") return Expr::constant(std::numbers::pi);
      if (name == "e") return Expr::constant(std::numbers::e);
      const Token* next = peek();
      const bool called = next && next->kind == TokenKind::left_paren;
      auto fn = function_from_name(name);
      if (!fn) {
        if (called) throw ParseError("unknown-function", "unknown function '" + name + "'", at);
        throw ParseError("syntax-error", "unknown identifier '" + name + "'", at);
      }
      if (!called) throw ParseError("syntax-error", "expected '(' after " + name, here());
      ++pos_;
      Expr arg = expr();
      expect(TokenKind::right_paren, "')'");
      return fold(Expr::call(*fn, arg));
    }
    default:
      throw ParseError("syntax-error", "unexpected '" + t->lexeme + "'", t->position);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_pos_;
  ParseOptions opts_;
};

} // namespace detail

inline Expr parse(std::string_view src, ParseOptions opts = {}) {
  return detail::Parser(src, opts).run();
}

namespace detail {

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

} // namespace detail

/// Fully parenthesized text that parses back to the same tree.
inline std::string to_string(const Expr& e) {
  switch (e.kind()) {
  case NodeKind::constant: {
    std::string s = detail::format_number(e.value());
    return e.value() < 0 || std::signbit(e.value()) ? "(" + s + ")" : s;
  }
  case NodeKind::variable: return "x";
  case NodeKind::negate: return "(-" + to_string(e.child(0)) + ")";
  case NodeKind::call:
    return std::string(function_name(e.function())) + "(" + to_string(e.child(0)) + ")";
  default: break;
  }
  const char* op = "+";
  switch (e.kind()) {
  case NodeKind::sub: op = " - "; break;
  case NodeKind::mul: op = " * "; break;
  case NodeKind::div: op = " / "; break;
  case NodeKind::pow: op = " ^ "; break;
  default: op = " + "; break;
  }
  return "(" + to_string(e.child(0)) + op + to_string(e.child(1)) + ")";
}

struct Affine {
  double slope;
  double intercept;
};

/// (s, b) when e is syntactically s*x + b, empty otherwise.
inline std::optional<Affine> affine_pattern(const Expr& e) {
  switch (e.kind()) {
  case NodeKind::constant: return Affine{0.0, e.value()};
  case NodeKind::variable: return Affine{1.0, 0.0};
  case NodeKind::negate: {
    auto a = affine_pattern(e.child(0));
    if (!a) return std::nullopt;
    return Affine{-a->slope, -a->intercept};
  }
  case NodeKind::add:
  case NodeKind::sub: {
    auto a = affine_pattern(e.child(0));
    auto b = affine_pattern(e.child(1));
    if (!a || !b) return std::nullopt;
    if (e.kind() == NodeKind::add) return Affine{a->slope + b->slope, a->intercept + b->intercept};
    return Affine{a->slope - b->slope, a->intercept - b->intercept};
  }
  case NodeKind::mul: {
    auto a = affine_pattern(e.child(0));
    auto b = affine_pattern(e.child(1));
    if (!a || !b) return std::nullopt;
    if (a->slope == 0.0) return Affine{a->intercept * b->slope, a->intercept * b->intercept};
    if (b->slope == 0.0) return Affine{b->intercept * a->slope, b->intercept * a->intercept};
    return std::nullopt;
  }
  case NodeKind::div: {
    auto a = affine_pattern(e.child(0));
    auto b = affine_pattern(e.child(1));
    if (!a || !b || b->slope != 0.0 || b->intercept == 0.0) return std::nullopt;
    return Affine{a->slope / b->intercept, a->intercept / b->intercept};
  }
  case NodeKind::pow: {
    const double p = e.child(1).is_constant() ? e.child(1).value() : std::nan("");
    auto a = affine_pattern(e.child(0));
    if (!a) return std::nullopt;
    if (p == 1.0) return a;
    if (p == 0.0) return Affine{0.0, 1.0};
    return std::nullopt;
  }
  case NodeKind::call: return std::nullopt;
  }
  return std::nullopt;
}

/// Slope s such that sup |e(x) - s*x| is finite, proven from the syntax:
/// sin, cos and atan are bounded; sums, products and continuous images of
/// bounded terms stay bounded. Empty when no such proof is found.
inline std::optional<double> linear_growth(const Expr& e) {
  if (auto a = affine_pattern(e)) return a->slope;
  auto bounded = [](const std::optional<double>& s) { return s && *s == 0.0; };
  switch (e.kind()) {
  case NodeKind::negate: {
    auto s = linear_growth(e.child(0));
    if (!s) return std::nullopt;
    return -*s;
  }
  case NodeKind::add:
  case NodeKind::sub: {
    auto a = linear_growth(e.child(0));
    auto b = linear_growth(e.child(1));
    if (!a || !b) return std::nullopt;
    return e.kind() == NodeKind::add ? *a + *b : *a - *b;
  }
  case NodeKind::mul: {
    auto ca = affine_pattern(e.child(0));
    auto cb = affine_pattern(e.child(1));
    if (ca && ca->slope == 0.0) {
      auto s = linear_growth(e.child(1));
      if (!s) return std::nullopt;
      return ca->intercept * *s;
    }
    if (cb && cb->slope == 0.0) {
      auto s = linear_growth(e.child(0));
      if (!s) return std::nullopt;
      return cb->intercept * *s;
    }
    if (bounded(linear_growth(e.child(0))) && bounded(linear_growth(e.child(1)))) return 0.0;
    return std::nullopt;
  }
  case NodeKind::div: {
    auto cb = affine_pattern(e.child(1));
    if (!cb || cb->slope != 0.0 || cb->intercept == 0.0) return std::nullopt;
    auto s = linear_growth(e.child(0));
    if (!s) return std::nullopt;
    return *s / cb->intercept;
  }
  case NodeKind::pow: {
    if (!e.child(1).is_constant()) return std::nullopt;
    const double p = e.child(1).value();
    if (p >= 0.0 && bounded(linear_growth(e.child(0)))) return 0.0;
    return std::nullopt;
  }
  case NodeKind::call:
    switch (e.function()) {
    case Function::sin:
    case Function::cos:
    case Function::atan: return 0.0;
    default: return bounded(linear_growth(e.child(0))) ? std::optional<double>(0.0) : std::nullopt;
    }
  default: return std::nullopt;
  }
}

} // namespace iterfun

#endif // ITERFUN_EXPRLANG_HPP
