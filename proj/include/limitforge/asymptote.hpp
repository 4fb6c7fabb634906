#pragma once

// Continuous analogues of the recurrences: F(x) = offset + integral of f from
// base to x, its inverse, and the closed-form growth laws.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limitforge/engine.hpp"
#include "limitforge/funcdsl.hpp"
#include "limitforge/quadrature.hpp"

namespace limitforge {

/// offset + integral_base^x f(t) dt, integrated lazily over the cells
/// [base + 2^i - 1, base + 2^(i+1) - 1] and cached. Queries inside a cached
/// panel use Boole's rule on [panel start, x], so value() is non-decreasing
/// for non-negative non-decreasing f and never depends on earlier queries.
class CumulativeIntegral {
 public:
  CumulativeIntegral(FunctionExpr integrand, double base, double offset, double tolerance,
                     std::size_t panel_budget = default_panel_budget());

  /// Throws std::invalid_argument for x < base, QuadratureError when the
  /// panel budget runs out.
  double value(double x) const;
  double operator()(double x) const { return value(x); }
  double derivative(double x) const { return integrand_.evaluate(x); }

  const FunctionExpr& integrand() const noexcept { return integrand_; }
  double base_point() const noexcept { return base_; }
  double offset() const noexcept { return offset_; }
  double tolerance() const noexcept { return tolerance_; }

  /// Right edge of the integrated region so far.
  double cached_upper() const;
  std::size_t cached_panels() const;

 private:
  struct Leaf {
    double left;
    double right;
    double value;
    double before;  // integral from base to left
  };

  void extend_to(double x) const;
  double cell_edge(std::size_t i) const;

  FunctionExpr integrand_;
  double base_;
  double offset_;
  double tolerance_;
  std::size_t budget_;

  mutable std::mutex mutex_;
  mutable std::vector<Leaf> leaves_;
  mutable std::size_t cells_done_ = 0;
  mutable CompensatedSum running_;
  mutable std::size_t panels_used_ = 0;
};

std::shared_ptr<const CumulativeIntegral> build_cumulative(const FunctionExpr& f, double base,
                                                           double offset, double tol = 1e-12);

/// x >= base with |F(x) - y| <= tol * max(1, |y|). Throws std::domain_error for
/// y below F(base) and std::overflow_error when the bracket passes 1e300.
double invert(const CumulativeIntegral& F, double y);

struct Prediction {
  double value = 0.0;
  /// Set when the integral of 1/g does not look divergent at n.
  std::optional<std::string> warning;
};

/// F^{-1}(G(n)) with F(x) = 1 + integral_0^x f and G(n) = integral_1^n 1/g
/// (G(n) = n without g).
Prediction predict(const FunctionExpr& f, const std::optional<FunctionExpr>& g, double n,
                   double tol = 1e-12);

struct ClosedForm {
  double c = 1.0;
  double e = 0.0;
  double l = 0.0;
};

struct NumericLaw {
  std::shared_ptr<const CumulativeIntegral> F;
  /// Absent means G(n) = n.
  std::shared_ptr<const CumulativeIntegral> G;
};

/// The law ln(n)/n against which 1 - n x_n is compared.
struct SecondTerm {};

struct GrowthLaw {
  std::variant<ClosedForm, NumericLaw, SecondTerm> form;
  std::string description;

  static GrowthLaw closed(double c, double e, double l, std::string description = {});
  static GrowthLaw numeric(const FunctionExpr& f, const std::optional<FunctionExpr>& g,
                           double tol = 1e-12);
  static GrowthLaw second_term();

  double evaluate(double n) const;
  double operator()(double n) const { return evaluate(n); }
  bool is_second_term() const { return std::holds_alternative<SecondTerm>(form); }
};

/// Which recorded sequence a law describes.
enum class Stream { Primary, Secondary, Aux };

const char* stream_name(Stream s);

struct TargetedLaw {
  Stream stream;
  GrowthLaw law;
};

class CatalogMiss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form laws known for the family, primary stream first.
std::vector<TargetedLaw> catalog(const RecurrenceSpec& spec);

/// F^{-1}(n) <= a_n <= F^{-1}(n) + c for FirstOrderInverse without g, with
/// c = a1 + 1/f(0). When f(0) = 0 the upper bound is taken from n = 3 on with
/// c = a2 + 1/f(F^{-1}(2)) - F^{-1}(2).
AuditReport theorem_bounds_audit(const Trajectory& traj, double tol = 1e-12);

}  // namespace limitforge
