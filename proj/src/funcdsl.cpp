#include "limitforge/funcdsl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

namespace limitforge {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " or " : ", ";
    out += items[i];
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* binary_symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::Add: return "+";
    case NodeKind::Subtract: return "-";
    case NodeKind::Multiply: return "*";
    case NodeKind::Divide: return "/";
    default: return "?";
  }
}

const char* call_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Ln: return "ln";
    case NodeKind::Exp: return "exp";
    case NodeKind::Sin: return "sin";
    case NodeKind::Sqrt: return "sqrt";
    default: return "?";
  }
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t offset,
                       std::vector<std::string> expected)
    : std::runtime_error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

DomainError::DomainError(std::string subexpression, double t, const std::string& what)
    : std::runtime_error("domain error in " + subexpression + " at t=" + format_number(t) + ": " +
                         what),
      subexpression_(std::move(subexpression)),
      t_(t) {}

// Recursive-descent parser emitting nodes in postfix order.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  FunctionExpr run() {
    if (text_.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      fail("empty expression", 0, {"expression"});
    }
    parse_expr();
    skip_ws();
    if (pos_ < text_.size()) {
      fail_expected(pos_, {"+", "-", "*", "/", "end of input"});
    }
    out_.source_ = std::string(text_);
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset,
                         std::vector<std::string> expected) {
    throw ParseError("syntax error at offset " + std::to_string(offset) + ": " + what, offset,
                     std::move(expected));
  }

  [[noreturn]] void fail_expected(std::size_t offset, std::vector<std::string> expected) {
    std::string what = "expected " + join(expected);
    if (offset < text_.size()) {
      what += ", found '" + std::string(1, text_[offset]) + "'";
    } else {
      what += ", found end of input";
    }
    fail(what, offset, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail_expected(pos_, {std::string(1, c)});
    ++pos_;
  }

  int emit(NodeKind kind, double value = 0.0, int lhs = -1, int rhs = -1) {
    out_.nodes_.push_back({kind, value, lhs, rhs});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        int rhs = parse_term();
        lhs = emit(NodeKind::Add, 0.0, lhs, rhs);
      } else if (peek('-')) {
        ++pos_;
        int rhs = parse_term();
        lhs = emit(NodeKind::Subtract, 0.0, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        int rhs = parse_factor();
        lhs = emit(NodeKind::Multiply, 0.0, lhs, rhs);
      } else if (peek('/')) {
        ++pos_;
        int rhs = parse_factor();
        lhs = emit(NodeKind::Divide, 0.0, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  int parse_factor() {
    if (peek('-')) {
      ++pos_;
      int operand = parse_factor();
      return emit(NodeKind::Negate, 0.0, operand);
    }
    int base = parse_atom();
    if (peek('^')) {
      ++pos_;
      double exponent = parse_exponent();
      if (peek('^')) fail("chained exponents are not supported", pos_, {"+", "-", "*", "/"});
      return emit(NodeKind::Power, exponent, base);
    }
    return base;
  }

  double parse_exponent() {
    skip_ws();
    bool parenthesised = false;
    if (peek('(')) {
      parenthesised = true;
      ++pos_;
    }
    skip_ws();
    bool negative = false;
    if (peek('-')) {
      negative = true;
      ++pos_;
      skip_ws();
    }
    if (!at_number()) {
      if (pos_ < text_.size() &&
          (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '(' ||
           text_[pos_] == '_')) {
        fail("exponent must be a numeric literal", pos_, {"number"});
      }
      fail_expected(pos_, {"number"});
    }
    double value = parse_number();
    if (parenthesised) expect(')');
    return negative ? -value : value;
  }

  bool at_number() const {
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
  }

  double parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = mark;  // 'e' belongs to whatever follows
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      fail("malformed number", start, {"number"});
    }
    return value;
  }

  int parse_atom() {
    skip_ws();
    if (at_number()) {
      return emit(NodeKind::Constant, parse_number());
    }
    if (peek('(')) {
      ++pos_;
      int inner = parse_expr();
      if (!peek(')')) fail_expected(pos_, {")", "+", "-", "*", "/"});
      ++pos_;
      return inner;
    }
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_')) {
        ++pos_;
      }
      std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "t") return emit(NodeKind::Variable);
      NodeKind call;
      if (ident == "ln") {
        call = NodeKind::Ln;
      } else if (ident == "exp") {
        call = NodeKind::Exp;
      } else if (ident == "sin") {
        call = NodeKind::Sin;
      } else if (ident == "sqrt") {
        call = NodeKind::Sqrt;
      } else {
        fail("unknown identifier '" + std::string(ident) + "'", start,
             {"t", "ln", "exp", "sin", "sqrt"});
      }
      expect('(');
      int arg = parse_expr();
      if (!peek(')')) fail_expected(pos_, {")", "+", "-", "*", "/"});
      ++pos_;
      return emit(call, 0.0, arg);
    }
    fail_expected(pos_, {"number", "t", "function call", "("});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  FunctionExpr out_;
};

FunctionExpr FunctionExpr::parse(std::string_view text) { return ExprParser(text).run(); }

FunctionExpr FunctionExpr::constant(double value) {
  FunctionExpr e;
  e.nodes_.push_back({NodeKind::Constant, value});
  e.source_ = format_number(value);
  return e;
}

FunctionExpr FunctionExpr::variable() {
  FunctionExpr e;
  e.nodes_.push_back({NodeKind::Variable});
  e.source_ = "t";
  return e;
}

FunctionExpr FunctionExpr::combine(const FunctionExpr& a, const FunctionExpr& b, NodeKind kind,
                                   const char* op) {
  FunctionExpr e;
  e.nodes_ = a.nodes_;
  const int shift = static_cast<int>(a.nodes_.size());
  for (Node n : b.nodes_) {
    if (n.lhs >= 0) n.lhs += shift;
    if (n.rhs >= 0) n.rhs += shift;
    e.nodes_.push_back(n);
  }
  e.nodes_.push_back({kind, 0.0, shift - 1, static_cast<int>(e.nodes_.size()) - 1});
  e.source_ = "(" + a.source_ + ")" + op + "(" + b.source_ + ")";
  return e;
}

FunctionExpr operator+(const FunctionExpr& a, const FunctionExpr& b) {
  return FunctionExpr::combine(a, b, NodeKind::Add, "+");
}
FunctionExpr operator-(const FunctionExpr& a, const FunctionExpr& b) {
  return FunctionExpr::combine(a, b, NodeKind::Subtract, "-");
}
FunctionExpr operator*(const FunctionExpr& a, const FunctionExpr& b) {
  return FunctionExpr::combine(a, b, NodeKind::Multiply, "*");
}
FunctionExpr operator/(const FunctionExpr& a, const FunctionExpr& b) {
  return FunctionExpr::combine(a, b, NodeKind::Divide, "/");
}

void FunctionExpr::domain_failure(int index, double t, const char* what) const {
  throw DomainError(render_node(index), t, what);
}

double FunctionExpr::evaluate(double t) const {
  std::array<double, 64> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (nodes_.size() > small.size()) {
    large.resize(nodes_.size());
    stack = large.data();
  }
  std::size_t top = 0;
  const int count = static_cast<int>(nodes_.size());
  for (int i = 0; i < count; ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: stack[top++] = n.value; break;
      case NodeKind::Variable: stack[top++] = t; break;
      case NodeKind::Negate: stack[top - 1] = -stack[top - 1]; break;
      case NodeKind::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
      case NodeKind::Subtract: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
      case NodeKind::Multiply: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
      case NodeKind::Divide:
        --top;
        if (stack[top] == 0.0) domain_failure(i, t, "division by zero");
        stack[top - 1] = stack[top - 1] / stack[top];
        break;
      case NodeKind::Power: {
        double base = stack[top - 1];
        if (base < 0.0 && std::trunc(n.value) != n.value) {
          domain_failure(i, t, "negative base with non-integer exponent");
        }
        if (base == 0.0 && n.value < 0.0) domain_failure(i, t, "zero base with negative exponent");
        stack[top - 1] = std::pow(base, n.value);
        break;
      }
      case NodeKind::Ln:
        if (!(stack[top - 1] > 0.0)) domain_failure(i, t, "logarithm of non-positive argument");
        stack[top - 1] = std::log(stack[top - 1]);
        break;
      case NodeKind::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case NodeKind::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case NodeKind::Sqrt:
        if (stack[top - 1] < 0.0) domain_failure(i, t, "square root of negative argument");
        stack[top - 1] = std::sqrt(stack[top - 1]);
        break;
    }
  }
  return stack[0];
}

std::string FunctionExpr::render_node(int index) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value < 0.0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
    case NodeKind::Variable: return "t";
    case NodeKind::Negate: return "(-" + render_node(n.lhs) + ")";
    case NodeKind::Add:
    case NodeKind::Subtract:
    case NodeKind::Multiply:
    case NodeKind::Divide:
      return "(" + render_node(n.lhs) + binary_symbol(n.kind) + render_node(n.rhs) + ")";
    case NodeKind::Power: {
      std::string exponent = n.value < 0.0 ? "(-" + format_number(-n.value) + ")"
                                           : format_number(n.value);
      return "(" + render_node(n.lhs) + "^" + exponent + ")";
    }
    case NodeKind::Ln:
    case NodeKind::Exp:
    case NodeKind::Sin:
    case NodeKind::Sqrt:
      return std::string(call_name(n.kind)) + "(" + render_node(n.lhs) + ")";
  }
  return {};
}

std::string FunctionExpr::render() const {
  if (nodes_.empty()) return {};
  return render_node(static_cast<int>(nodes_.size()) - 1);
}

std::optional<Monomial> FunctionExpr::monomial_at(int index) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case NodeKind::Constant: return Monomial{n.value, 0.0};
    case NodeKind::Variable: return Monomial{1.0, 1.0};
    case NodeKind::Negate: {
      auto m = monomial_at(n.lhs);
      if (!m) return std::nullopt;
      return Monomial{-m->coefficient, m->power};
    }
    case NodeKind::Multiply:
    case NodeKind::Divide: {
      auto a = monomial_at(n.lhs);
      auto b = monomial_at(n.rhs);
      if (!a || !b) return std::nullopt;
      if (n.kind == NodeKind::Multiply) {
        return Monomial{a->coefficient * b->coefficient, a->power + b->power};
      }
      if (b->coefficient == 0.0) return std::nullopt;
      return Monomial{a->coefficient / b->coefficient, a->power - b->power};
    }
    case NodeKind::Power: {
      auto m = monomial_at(n.lhs);
      if (!m || !(m->coefficient > 0.0)) return std::nullopt;
      return Monomial{std::pow(m->coefficient, n.value), m->power * n.value};
    }
    case NodeKind::Sqrt: {
      auto m = monomial_at(n.lhs);
      if (!m || !(m->coefficient > 0.0)) return std::nullopt;
      return Monomial{std::sqrt(m->coefficient), m->power / 2.0};
    }
    default: return std::nullopt;
  }
}

std::optional<Monomial> FunctionExpr::as_monomial() const {
  if (nodes_.empty()) return std::nullopt;
  return monomial_at(static_cast<int>(nodes_.size()) - 1);
}

std::optional<double> FunctionExpr::as_scaled_exp() const {
  if (nodes_.empty()) return std::nullopt;
  auto is_exp_t = [&](int i) {
    return nodes_[i].kind == NodeKind::Exp && nodes_[nodes_[i].lhs].kind == NodeKind::Variable;
  };
  auto is_const = [&](int i) { return nodes_[i].kind == NodeKind::Constant; };
  const int root = static_cast<int>(nodes_.size()) - 1;
  const Node& r = nodes_[root];
  if (is_exp_t(root)) return 1.0;
  if (r.kind == NodeKind::Multiply) {
    if (is_const(r.lhs) && is_exp_t(r.rhs)) return nodes_[r.lhs].value;
    if (is_exp_t(r.lhs) && is_const(r.rhs)) return nodes_[r.rhs].value;
  }
  if (r.kind == NodeKind::Divide && is_exp_t(r.lhs) && is_const(r.rhs) &&
      nodes_[r.rhs].value != 0.0) {
    return 1.0 / nodes_[r.rhs].value;
  }
  return std::nullopt;
}

MonotonicityVerdict check_hypotheses(const FunctionExpr& expr, double lo, double hi,
                                     std::size_t n_samples) {
  if (!(lo < hi)) throw std::invalid_argument("check_hypotheses: require lo < hi");
  if (n_samples < 2) throw std::invalid_argument("check_hypotheses: require n_samples >= 2");

  MonotonicityVerdict verdict;
  verdict.samples_used = n_samples;
  verdict.grid.resize(n_samples);
  const double last = static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double s = static_cast<double>(i) / last;
    verdict.grid[i] = lo > 0.0 ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
  }
  verdict.grid.front() = lo;
  verdict.grid.back() = hi;

  std::vector<double> values(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) values[i] = expr.evaluate(verdict.grid[i]);

  verdict.positive_on_samples = true;
  verdict.non_decreasing_on_samples = true;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (verdict.grid[i] > lo && !(values[i] > 0.0)) verdict.positive_on_samples = false;
    if (i + 1 < n_samples && values[i + 1] < values[i]) verdict.non_decreasing_on_samples = false;
  }

  // Walk back from the right end while the samples keep non-increasing.
  std::size_t from = n_samples - 1;
  while (from > 0 && values[from] <= values[from - 1]) --from;
  if (from + 1 < n_samples) verdict.non_increasing_from = verdict.grid[from];
  return verdict;
}

}  // namespace limitforge
