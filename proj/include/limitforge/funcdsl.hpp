#pragma once

// Expression language for user-supplied real functions of one variable `t`.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' exponent)?
//   atom   := number | 't' | ident '(' expr ')' | '(' expr ')'
//   exponent := ['-'] number | '(' ['-'] number ')'
//
// Recognised calls are ln, exp, sin and sqrt. Exponents are numeric
// literals only, so `t^t` and `2^3^4` are rejected.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace limitforge {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Raised when evaluation leaves a subexpression's natural domain.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string subexpression, double t, const std::string& what);

  const std::string& subexpression() const noexcept { return subexpression_; }
  double at() const noexcept { return t_; }

 private:
  std::string subexpression_;
  double t_;
};

enum class NodeKind {
  Constant,
  Variable,
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  Power,
  Ln,
  Exp,
  Sin,
  Sqrt,
};

/// c * t^p, as recognised by FunctionExpr::as_monomial.
struct Monomial {
  double coefficient = 1.0;
  double power = 0.0;
};

/// Immutable expression tree stored in postfix order: every node's operands
/// precede it and the root is the last node.
class FunctionExpr {
 public:
  struct Node {
    NodeKind kind;
    double value = 0.0;  // literal for Constant, exponent for Power
    int lhs = -1;
    int rhs = -1;
  };

  static FunctionExpr parse(std::string_view text);

  static FunctionExpr constant(double value);
  static FunctionExpr variable();

  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  /// Fully parenthesised text that parses back to an identical tree.
  std::string render() const;
  const std::string& source_text() const noexcept { return source_; }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::optional<Monomial> as_monomial() const;
  /// Coefficient c when the expression is c * exp(t).
  std::optional<double> as_scaled_exp() const;

  friend FunctionExpr operator+(const FunctionExpr& a, const FunctionExpr& b);
  friend FunctionExpr operator-(const FunctionExpr& a, const FunctionExpr& b);
  friend FunctionExpr operator*(const FunctionExpr& a, const FunctionExpr& b);
  friend FunctionExpr operator/(const FunctionExpr& a, const FunctionExpr& b);

 private:
  friend class ExprParser;

  static FunctionExpr combine(const FunctionExpr& a, const FunctionExpr& b, NodeKind kind,
                              const char* op);
  std::string render_node(int index) const;
  std::optional<Monomial> monomial_at(int index) const;
  [[noreturn]] void domain_failure(int index, double t, const char* what) const;

  std::vector<Node> nodes_;
  std::string source_;
};

/// Sampling-based check of the positivity and monotonicity hypotheses.
struct MonotonicityVerdict {
  bool positive_on_samples = false;
  /// Smallest grid point from which f was non-increasing on every later sample.
  std::optional<double> non_increasing_from;
  bool non_decreasing_on_samples = false;
  std::size_t samples_used = 0;
  std::vector<double> grid;
};

/// Samples `expr` on n_samples points of [lo, hi]: geometric when lo > 0,
/// uniform otherwise. Positivity is judged on the points strictly above lo.
MonotonicityVerdict check_hypotheses(const FunctionExpr& expr, double lo, double hi,
                                     std::size_t n_samples);

}  // namespace limitforge
