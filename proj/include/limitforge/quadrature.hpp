#pragma once

// Adaptive Simpson quadrature with panel bisection. Accepted panels carry the
// Richardson-corrected value (S2 + (S2 - S1)/15, i.e. Boole's rule), and are
// produced strictly left to right so callers can stream and cache them.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "limitforge/compensated.hpp"

namespace limitforge {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double left, double right, double error_estimate);

  double worst_left() const noexcept { return left_; }
  double worst_right() const noexcept { return right_; }
  double worst_error() const noexcept { return error_; }

 private:
  double left_;
  double right_;
  double error_;
};

/// 10^6 unless LIMITFORGE_PANEL_BUDGET holds a positive integer.
std::size_t default_panel_budget();

struct Panel {
  double left;
  double right;
  double value;
  double error_estimate;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// A panel [a,b] is accepted when |S2 - S1|/15 <= max(relative*|S2|,
/// absolute_density*(b-a)), or when it can no longer be bisected.
struct QuadratureTolerance {
  double relative = 1e-12;
  double absolute_density = 0.0;
};

template <class Integrand>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(Integrand f, QuadratureTolerance tol, std::size_t budget)
      : f_(std::move(f)), tol_(tol), budget_(budget) {}

  /// Starts streaming panels of [a, b]; see next().
  void begin(double a, double b) {
    stack_.clear();
    if (!(a < b)) return;
    const double m = 0.5 * (a + b);
    const double fa = f_(a), fm = f_(m), fb = f_(b);
    stack_.push_back({a, m, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)});
  }

  bool done() const { return stack_.empty(); }

  /// Next accepted panel in left-to-right order, or nullopt when exhausted.
  std::optional<Panel> next() {
    while (!stack_.empty()) {
      const Pending p = stack_.back();
      stack_.pop_back();
      const double lm = 0.5 * (p.a + p.m);
      const double rm = 0.5 * (p.m + p.b);
      const double flm = f_(lm), frm = f_(rm);
      const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
      const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
      const double s2 = left + right;
      if (!std::isfinite(s2)) {
        throw QuadratureError("non-finite integrand value", p.a, p.b, INFINITY);
      }
      const double err = std::fabs(s2 - p.whole) / 15.0;
      const double limit =
          std::fmax(tol_.relative * std::fabs(s2), tol_.absolute_density * (p.b - p.a));
      const bool splittable = p.a < lm && lm < p.m && p.m < rm && rm < p.b;
      if (err <= limit || !splittable) {
        return Panel{p.a, p.b, s2 + (s2 - p.whole) / 15.0, err};
      }
      if (++used_ > budget_) {
        throw QuadratureError("panel budget of " + std::to_string(budget_) + " exhausted",
                              p.a, p.b, err);
      }
      stack_.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right});
      stack_.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left});
    }
    return std::nullopt;
  }

  QuadratureResult integrate(double a, double b) {
    QuadratureResult result;
    begin(a, b);
    CompensatedSum value, error;
    while (auto panel = next()) {
      value.add(panel->value);
      error.add(panel->error_estimate);
      ++result.panels;
    }
    result.value = value.value();
    result.error_estimate = error.value();
    return result;
  }

  std::size_t panels_used() const { return used_; }
  const Integrand& integrand() const { return f_; }

 private:
  struct Pending {
    double a, m, b;
    double fa, fm, fb;
    double whole;
  };

  Integrand f_;
  QuadratureTolerance tol_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::vector<Pending> stack_;
};

template <class Integrand>
QuadratureResult integrate(Integrand f, double a, double b, QuadratureTolerance tol,
                           std::size_t budget = default_panel_budget()) {
  AdaptiveSimpson<Integrand> q(std::move(f), tol, budget);
  return q.integrate(a, b);
}

}  // namespace limitforge
