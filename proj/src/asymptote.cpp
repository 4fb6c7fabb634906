#include "limitforge/asymptote.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace limitforge {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Boole's rule on [a, b]: the same combination an accepted panel carries.
template <class F>
double boole(const F& f, double a, double b) {
  const double h = b - a;
  const double f0 = f(a), f1 = f(a + 0.25 * h), f2 = f(a + 0.5 * h), f3 = f(a + 0.75 * h),
               f4 = f(b);
  return h / 90.0 * (7.0 * (f0 + f4) + 32.0 * (f1 + f3) + 12.0 * f2);
}

}  // namespace

CumulativeIntegral::CumulativeIntegral(FunctionExpr integrand, double base, double offset,
                                       double tolerance, std::size_t panel_budget)
    : integrand_(std::move(integrand)),
      base_(base),
      offset_(offset),
      tolerance_(tolerance),
      budget_(panel_budget) {
  if (!std::isfinite(base) || !std::isfinite(offset)) {
    throw std::invalid_argument("cumulative integral: base and offset must be finite");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("cumulative integral: tol must be > 0");
}

double CumulativeIntegral::cell_edge(std::size_t i) const {
  return base_ + (std::ldexp(1.0, static_cast<int>(i)) - 1.0);
}

void CumulativeIntegral::extend_to(double x) const {
  while (leaves_.empty() || leaves_.back().right < x) {
    const double a = cell_edge(cells_done_);
    const double b = cell_edge(cells_done_ + 1);
    if (!std::isfinite(b)) throw std::overflow_error("cumulative integral: argument too large");
    auto f = [this](double t) { return integrand_.evaluate(t); };
    AdaptiveSimpson<decltype(f)> q(f, {tolerance_, 0.0}, budget_ - panels_used_);
    q.begin(a, b);
    while (auto p = q.next()) {
      leaves_.push_back({p->left, p->right, p->value, running_.value()});
      running_.add(p->value);
    }
    panels_used_ += q.panels_used();
    ++cells_done_;
  }
}

double CumulativeIntegral::value(double x) const {
  if (std::isnan(x) || x < base_) {
    throw std::invalid_argument("cumulative integral: x = " + fmt(x) + " below base " +
                                fmt(base_));
  }
  if (x == base_) return offset_;

  std::lock_guard lock(mutex_);
  extend_to(x);
  auto it = std::upper_bound(leaves_.begin(), leaves_.end(), x,
                             [](double v, const Leaf& l) { return v < l.left; });
  const Leaf& leaf = *(it - 1);
  const double after = (it == leaves_.end()) ? running_.value() : it->before;
  if (x == leaf.right) return offset_ + after;
  auto f = [this](double t) { return integrand_.evaluate(t); };
  double partial = boole(f, leaf.left, x);
  partial = std::clamp(partial, 0.0, std::max(leaf.value, 0.0));
  return std::min(offset_ + (leaf.before + partial), offset_ + after);
}

double CumulativeIntegral::cached_upper() const {
  std::lock_guard lock(mutex_);
  return leaves_.empty() ? base_ : leaves_.back().right;
}

std::size_t CumulativeIntegral::cached_panels() const {
  std::lock_guard lock(mutex_);
  return leaves_.size();
}

std::shared_ptr<const CumulativeIntegral> build_cumulative(const FunctionExpr& f, double base,
                                                           double offset, double tol) {
  return std::make_shared<const CumulativeIntegral>(f, base, offset, tol);
}

double invert(const CumulativeIntegral& F, double y) {
  const double base = F.base_point();
  const double floor_value = F.value(base);
  const double slack = F.tolerance() * std::max(1.0, std::fabs(y));
  if (std::isnan(y) || y < floor_value - slack) {
    throw std::domain_error("invert: y = " + fmt(y) + " below F(base) = " + fmt(floor_value));
  }
  if (y <= floor_value) return base;

  double lo = base;
  double width = 1.0;
  double hi = base + width;
  while (F.value(hi) < y) {
    lo = hi;
    width *= 2.0;
    hi = base + width;
    if (hi > 1e300) throw std::overflow_error("invert: bracket expanded past 1e300");
  }

  while (hi - lo > 1e-3 * std::max(1.0, std::fabs(hi))) {
    const double mid = lo + 0.5 * (hi - lo);
    (F.value(mid) < y ? lo : hi) = mid;
  }

  double x = lo + 0.5 * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    const double r = F.value(x) - y;
    if (std::fabs(r) <= 0.1 * slack) return x;
    (r < 0.0 ? lo : hi) = x;
    const double d = F.derivative(x);
    double next = (d > 0.0 && std::isfinite(d)) ? x - r / d : lo + 0.5 * (hi - lo);
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (next == x) break;
    x = next;
  }
  return x;
}

Prediction predict(const FunctionExpr& f, const std::optional<FunctionExpr>& g, double n,
                   double tol) {
  if (!(n >= 1.0)) throw std::invalid_argument("predict: n must be >= 1");
  auto F = build_cumulative(f, 0.0, 1.0, tol);
  Prediction out;
  double target = n;
  if (g) {
    auto G = build_cumulative(FunctionExpr::constant(1.0) / *g, 1.0, 0.0, tol);
    target = G->value(n);
    if (n >= 100.0) {
      const double early = G->value(std::sqrt(n));
      if (target - early < 0.1 * target) {
        out.warning = "integral of 1/g grows by under 10% between sqrt(n) and n = " + fmt(n) +
                      "; it may converge";
      }
    }
  }
  out.value = invert(*F, target);
  return out;
}

GrowthLaw GrowthLaw::closed(double c, double e, double l, std::string description) {
  if (description.empty()) {
    description = fmt(c) + " * n^" + fmt(e);
    if (l != 0.0) description += " * ln(n)^" + fmt(l);
  }
  return {ClosedForm{c, e, l}, std::move(description)};
}

GrowthLaw GrowthLaw::numeric(const FunctionExpr& f, const std::optional<FunctionExpr>& g,
                             double tol) {
  NumericLaw law{build_cumulative(f, 0.0, 1.0, tol), nullptr};
  std::string description = "F^-1(" + std::string(g ? "G(n)" : "n") + "), F(x) = 1 + int_0^x " +
                            f.render();
  if (g) {
    law.G = build_cumulative(FunctionExpr::constant(1.0) / *g, 1.0, 0.0, tol);
    description += ", G(n) = int_1^n 1/" + g->render();
  }
  return {std::move(law), std::move(description)};
}

GrowthLaw GrowthLaw::second_term() { return {SecondTerm{}, "1 - n x_n ~ ln(n)/n"}; }

double GrowthLaw::evaluate(double n) const {
  if (const auto* c = std::get_if<ClosedForm>(&form)) {
    double v = c->c * std::pow(n, c->e);
    if (c->l != 0.0) v *= std::pow(std::log(n), c->l);
    return v;
  }
  if (const auto* num = std::get_if<NumericLaw>(&form)) {
    const double target = num->G ? num->G->value(n) : n;
    return invert(*num->F, target);
  }
  return std::log(n) / n;
}

const char* stream_name(Stream s) {
  switch (s) {
    case Stream::Primary: return "primary";
    case Stream::Secondary: return "secondary";
    case Stream::Aux: return "aux";
  }
  return "unknown";
}

std::vector<TargetedLaw> catalog(const RecurrenceSpec& spec) {
  using L = GrowthLaw;
  if (const auto* s = std::get_if<FirstOrderInverse>(&spec)) {
    double cg = 1.0, gamma = 0.0;
    if (s->g) {
      const auto gm = s->g->as_monomial();
      if (!gm || !(gm->coefficient > 0.0)) {
        throw CatalogMiss("no closed form for g = " + s->g->render());
      }
      cg = gm->coefficient;
      gamma = gm->power;
    }
    if (gamma > 1.0) throw CatalogMiss("integral of 1/g converges; no growth law");
    if (const auto fm = s->f.as_monomial(); fm && fm->coefficient > 0.0 && fm->power >= 0.0) {
      const double b1 = fm->power + 1.0;
      if (gamma == 1.0) {
        const double c = std::pow(b1 / (fm->coefficient * cg), 1.0 / b1);
        return {{Stream::Primary, L::closed(c, 0.0, 1.0 / b1)}};
      }
      const double c = std::pow(b1 / (fm->coefficient * cg * (1.0 - gamma)), 1.0 / b1);
      return {{Stream::Primary, L::closed(c, (1.0 - gamma) / b1, 0.0)}};
    }
    if (const auto ce = s->f.as_scaled_exp(); ce && *ce > 0.0 && gamma < 1.0) {
      return {{Stream::Primary, L::closed(1.0 - gamma, 0.0, 1.0)}};
    }
    throw CatalogMiss("no closed form for f = " + s->f.render());
  }
  if (std::holds_alternative<CumulativeSecondOrder>(spec)) {
    return {{Stream::Primary, L::closed(1.0 / 6.0, 2.0, 0.0, "n^2/6")},
            {Stream::Aux, L::closed(1.0 / 18.0, 3.0, 0.0, "n^3/18")}};
  }
  if (const auto* s = std::get_if<TauberianGenerator>(&spec)) {
    const double p = s->p, q = s->q;
    const double r = 1.0 + q / p;
    // A^(q/p+1)/n -> r and a ~ A^(-1/p) give a ~ (r n)^(-1/(p+q)).
    return {{Stream::Primary,
             L::closed(std::pow(r, -1.0 / (p + q)), -1.0 / (p + q), 0.0,
                       "(" + fmt(r) + " n)^(-1/" + fmt(p + q) +
                           "), from A^(q/p+1)/n -> q/p+1 and a ~ A^(-1/p)")},
            {Stream::Aux, L::closed(std::pow(r, p / (p + q)), p / (p + q), 0.0,
                                    "(" + fmt(r) + " n)^(" + fmt(p) + "/" + fmt(p + q) + ")")}};
  }
  if (std::holds_alternative<Coupled>(spec)) {
    const double c = std::cbrt(3.0);
    return {{Stream::Primary, L::closed(c, 1.0 / 3.0, 0.0, "(3n)^(1/3)")},
            {Stream::Secondary, L::closed(c, 1.0 / 3.0, 0.0, "(3n)^(1/3)")}};
  }
  if (std::holds_alternative<QuadraticMap>(spec)) {
    return {{Stream::Primary, L::closed(1.0, -1.0, 0.0, "1/n")},
            {Stream::Primary, L::second_term()}};
  }
  if (const auto* s = std::get_if<DrivenSqrt>(&spec)) {
    if (s->driver == Driver::Constant) {
      return {{Stream::Primary, L::closed(std::sqrt(2.0), 0.5, 0.0, "sqrt(2n)")},
              {Stream::Aux, L::closed(1.0, 1.0, 0.0, "n")}};
    }
    return {{Stream::Primary, L::closed(1.0, 0.5, 0.0, "sqrt(n)")},
            {Stream::Aux, L::closed(0.5, 1.0, 0.0, "n/2")}};
  }
  throw CatalogMiss("no catalog entry for " + family_name(spec));
}

AuditReport theorem_bounds_audit(const Trajectory& traj, double tol) {
  const auto* s = std::get_if<FirstOrderInverse>(&traj.spec);
  if (s == nullptr || s->g) {
    throw std::invalid_argument("theorem_bounds_audit: needs FirstOrderInverse without g");
  }
  auto F = build_cumulative(s->f, 0.0, 1.0, tol);
  const double f0 = s->f.evaluate(0.0);

  AuditCheck lower{"F^-1(n) <= a_n"};
  AuditCheck upper{"a_n <= F^-1(n) + c"};
  std::int64_t upper_from = 1;
  double c = 0.0;
  if (f0 > 0.0) {
    c = s->a1 + 1.0 / f0;
  } else {
    const double a2 = s->a1 + 1.0 / s->f.evaluate(s->a1);
    const double x2 = invert(*F, 2.0);
    c = a2 + 1.0 / s->f.evaluate(x2) - x2;
    upper_from = 3;
  }
  upper.name += ", c = " + fmt(c);

  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::int64_t n = traj.checkpoints[i];
    const double x = invert(*F, static_cast<double>(n));
    const double slack = F->tolerance() * std::max(1.0, x) * 10.0;
    lower.record(n, traj.values[i] + slack, x);
    if (n >= upper_from) upper.record(n, x + c, traj.values[i]);
  }
  return {family_name(traj.spec), {lower, upper}};
}

}  // namespace limitforge
