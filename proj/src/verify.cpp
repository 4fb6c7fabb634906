#include "limitforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "limitforge/compensated.hpp"

namespace limitforge {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Differences at or below this are rounding, not approximation error.
double noise_floor(const GrowthLaw& law, double predicted) {
  if (const auto* num = std::get_if<NumericLaw>(&law.form)) {
    return std::max(4.0 * kEps, 10.0 * num->F->tolerance());
  }
  if (law.is_second_term()) return 4.0 * kEps / std::fabs(predicted);
  return 4.0 * kEps;
}

struct Line {
  double slope;
  double rss;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    rss += r * r;
  }
  return {slope, rss};
}

}  // namespace

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Converging: return "converging";
    case Trend::Stalled: return "stalled";
    case Trend::Diverging: return "diverging";
  }
  return "unknown";
}

const char* rate_model_name(RateModel m) {
  return m == RateModel::Power ? "power" : "logarithmic";
}

const char* limit_verdict_name(LimitVerdict v) {
  switch (v) {
    case LimitVerdict::Diverging: return "diverging";
    case LimitVerdict::ApparentlyFinite: return "apparently_finite";
    case LimitVerdict::Undetermined: return "undetermined";
  }
  return "unknown";
}

Trend classify_trend(const std::vector<double>& errors, double tolerance) {
  if (errors.size() < 3) throw std::invalid_argument("trend needs at least 3 checkpoints");
  const double e1 = errors[errors.size() - 3];
  const double e2 = errors[errors.size() - 2];
  const double e3 = errors.back();
  if (!std::isfinite(e3)) return Trend::Diverging;
  if (e2 <= e1 && e3 <= e2 && e3 <= tolerance) return Trend::Converging;
  if (e2 > e1 && e3 > e2 && e3 > tolerance) return Trend::Diverging;
  return Trend::Stalled;
}

std::optional<FittedRate> fit_rate(const std::vector<std::int64_t>& checkpoints,
                                   const std::vector<double>& errors) {
  std::vector<double> log_n, log_ln_n, log_e;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double n = static_cast<double>(checkpoints[i]);
    if (checkpoints[i] < 3 || !(errors[i] > 0.0) || !std::isfinite(errors[i])) continue;
    log_n.push_back(std::log(n));
    log_ln_n.push_back(std::log(std::log(n)));
    log_e.push_back(std::log(errors[i]));
  }
  if (log_e.size() < 2) return std::nullopt;
  const Line power = least_squares(log_n, log_e);
  const Line logarithmic = least_squares(log_ln_n, log_e);
  if (logarithmic.rss < power.rss) {
    return FittedRate{-logarithmic.slope, RateModel::Logarithmic, logarithmic.rss, log_e.size()};
  }
  return FittedRate{-power.slope, RateModel::Power, power.rss, log_e.size()};
}

ConvergenceReport ratio_report(const std::vector<std::int64_t>& checkpoints,
                               const std::vector<double>& values, const GrowthLaw& law,
                               double tolerance) {
  if (checkpoints.size() != values.size()) {
    throw std::invalid_argument("ratio_report: checkpoints and values differ in length");
  }
  if (checkpoints.size() < 3) throw std::invalid_argument("ratio_report: need >= 3 checkpoints");

  ConvergenceReport r;
  r.law = law.description;
  r.checkpoints = checkpoints;
  r.values = values;
  r.tolerance_used = tolerance;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double n = static_cast<double>(checkpoints[i]);
    double predicted = kNaN, ratio = kNaN, error = kNaN;
    if (!(law.is_second_term() && checkpoints[i] < 2)) {
      predicted = law.evaluate(n);
      if (law.is_second_term()) {
        ratio = std::fma(-n, values[i], 1.0) / predicted;
      } else {
        ratio = values[i] / predicted;
      }
      error = std::fabs(ratio - 1.0);
      if (error <= noise_floor(law, predicted)) error = 0.0;
    }
    r.predictions.push_back(predicted);
    r.ratios.push_back(ratio);
    r.errors.push_back(error);
  }
  r.final_ratio = r.ratios.back();
  r.trend = classify_trend(r.errors, tolerance);
  r.fitted_rate = fit_rate(r.checkpoints, r.errors);
  return r;
}

ConvergenceReport ratio_report(const Trajectory& traj, const GrowthLaw& law, double tolerance,
                               Stream stream) {
  const std::vector<double>* values = &traj.values;
  if (stream == Stream::Secondary) values = &traj.secondary;
  if (stream == Stream::Aux) values = &traj.aux;
  if (values->empty()) {
    throw std::invalid_argument(std::string("ratio_report: trajectory has no ") +
                                stream_name(stream) + " stream");
  }
  ConvergenceReport r = ratio_report(traj.checkpoints, *values, law, tolerance);
  r.stream = stream;
  return r;
}

AuditReport inequality_audit(const Trajectory& traj) {
  AuditReport report{family_name(traj.spec), {}};
  auto n_of = [&](std::size_t i) { return traj.checkpoints[i]; };
  const std::size_t size = traj.size();

  if (const auto* s = std::get_if<FirstOrderInverse>(&traj.spec)) {
    const auto m = s->f.as_monomial();
    if (!s->g && m && m->coefficient == 1.0 && m->power == 1.0 && s->a1 == 1.0) {
      AuditCheck lower{"a_n^2 >= 2n"};
      AuditCheck upper{"a_n^2 <= 2n + ln(n-1)/2"};
      for (std::size_t i = 0; i < size; ++i) {
        const std::int64_t n = n_of(i);
        const double dn = static_cast<double>(n);
        const double sq = traj.values[i] * traj.values[i];
        if (n >= 2) lower.record(n, sq, 2.0 * dn);
        if (n >= 3) upper.record(n, 2.0 * dn + 0.5 * std::log(dn - 1.0), sq);
      }
      report.checks = {lower, upper};
      return report;
    }
    if (!s->g) return theorem_bounds_audit(traj);
    throw std::invalid_argument("inequality_audit: no inequality registered for g-driven steps");
  }

  if (const auto* s = std::get_if<CumulativeSecondOrder>(&traj.spec)) {
    if (!(s->a1 >= 1.0)) throw std::invalid_argument("inequality_audit: cumulative needs a1 >= 1");
    AuditCheck a_lower{"a_n >= n"};
    AuditCheck sum_lower{"A_n >= n(n+1)/2"};
    AuditCheck cube{"2a_n^3 >= 3A_{n-1}^2"};
    for (std::size_t i = 0; i < size; ++i) {
      const std::int64_t n = n_of(i);
      const double dn = static_cast<double>(n);
      const double a = traj.values[i];
      a_lower.record(n, a, dn);
      sum_lower.record(n, traj.aux[i], dn * (dn + 1.0) / 2.0);
      if (n >= 2) {
        const double prev_sum = traj.previous_aux[i];
        cube.record(n, 2.0 * a * a * a, 3.0 * prev_sum * prev_sum);
      }
    }
    report.checks = {a_lower, sum_lower, cube};
    return report;
  }

  if (const auto* s = std::get_if<TauberianGenerator>(&traj.spec)) {
    AuditCheck exact{"|a_n^p A_n - 1| <= 1e-12"};
    for (std::size_t i = 0; i < size; ++i) {
      const double err = std::fabs(ipow(traj.values[i], s->p) * traj.aux[i] - 1.0);
      exact.record(n_of(i), 1e-12, err);
    }
    report.checks = {exact};
    return report;
  }

  if (std::holds_alternative<Coupled>(traj.spec)) {
    AuditCheck uncertainty{"a_n^3 b_n^3 >= 9(n-1)^2"};
    for (std::size_t i = 0; i < size; ++i) {
      const std::int64_t n = n_of(i);
      if (n < 2) continue;
      const double a = traj.values[i], b = traj.secondary[i];
      const double m = static_cast<double>(n - 1);
      uncertainty.record(n, (a * a * a) * (b * b * b), 9.0 * m * m);
    }
    report.checks = {uncertainty};
    return report;
  }

  if (std::holds_alternative<QuadraticMap>(traj.spec)) {
    AuditCheck below{"n x_n < 1"};
    AuditCheck positive{"x_n > 0"};
    for (std::size_t i = 0; i < size; ++i) {
      const std::int64_t n = n_of(i);
      below.record(n, 1.0, static_cast<double>(n) * traj.values[i], true);
      positive.record(n, traj.values[i], 0.0, true);
    }
    report.checks = {below, positive};
    return report;
  }

  if (const auto* s = std::get_if<DrivenSqrt>(&traj.spec)) {
    AuditCheck energy{"a_n^2 >= a1^2 + 2 sum d(k)"};
    AuditCheck linear{"a_n^2 >= 2n"};
    const bool with_linear = s->driver == Driver::Constant && s->a1 >= 1.0;
    for (std::size_t i = 0; i < size; ++i) {
      const std::int64_t n = n_of(i);
      const double sq = traj.values[i] * traj.values[i];
      energy.record(n, sq, s->a1 * s->a1 + 2.0 * traj.aux[i]);
      if (with_linear && n >= 2) linear.record(n, sq, 2.0 * static_cast<double>(n));
    }
    report.checks = {energy};
    if (with_linear) report.checks.push_back(linear);
    return report;
  }

  throw std::invalid_argument("inequality_audit: no inequality registered for " +
                              family_name(traj.spec));
}

namespace {

SequenceClassification classify_stream(const std::vector<std::int64_t>& n,
                                       const std::vector<double>& v) {
  SequenceClassification c;
  const std::size_t k = v.size();
  const double n1 = static_cast<double>(n[k - 3]), n2 = static_cast<double>(n[k - 2]),
               n3 = static_cast<double>(n[k - 1]);
  const double v1 = v[k - 3], v2 = v[k - 2], v3 = v[k - 1];
  c.normalized = v3 / std::cbrt(n3);

  if (std::fabs(v3 - v2) <= 1e-9 * std::fabs(v3)) {
    c.verdict = LimitVerdict::ApparentlyFinite;
    c.limit = v3;
    c.rule = "last two checkpoints agree to 1e-9 relative";
    return c;
  }

  // a - v_n ~ C/n: both increments must give the same C.
  const double c_early = (v2 - v1) / (1.0 / n1 - 1.0 / n2);
  const double c_late = (v3 - v2) / (1.0 / n2 - 1.0 / n3);
  if (c_early > 0.0 && c_late > 0.0 && std::fabs(c_late - c_early) <= 0.05 * c_late) {
    c.verdict = LimitVerdict::ApparentlyFinite;
    c.limit = v3 + c_late / n3;
    c.rule = "increments follow a C/n tail (C agrees to 5%)";
    return c;
  }

  const double exponent = std::log(v3 / v2) / std::log(n3 / n2);
  if (v3 > 10.0 * v.front() && exponent >= 0.05) {
    c.verdict = LimitVerdict::Diverging;
    c.rule = "grew past 10x its start, local exponent " + std::to_string(exponent);
    return c;
  }
  c.rule = "neither stalled nor visibly growing";
  return c;
}

}  // namespace

LimitClassification classify_limits(const Trajectory& traj) {
  if (!std::holds_alternative<Coupled>(traj.spec)) {
    throw std::invalid_argument("classify_limits: needs a coupled trajectory");
  }
  if (traj.size() < 5) throw std::invalid_argument("classify_limits: need >= 5 checkpoints");

  LimitClassification out;
  out.a = classify_stream(traj.checkpoints, traj.values);
  out.b = classify_stream(traj.checkpoints, traj.secondary);

  const double n = static_cast<double>(traj.checkpoints.back());
  auto companion = [n](SequenceClassification& self, double own, double other) {
    if (!self.limit) return;
    const double a = *self.limit;
    self.companion_ratio = other / n * a * a;
    self.tail_ratio = n * (a - own) / (a * a * a * a);
  };
  companion(out.a, traj.values.back(), traj.secondary.back());
  companion(out.b, traj.secondary.back(), traj.values.back());

  if (out.a.verdict == LimitVerdict::ApparentlyFinite &&
      out.b.verdict == LimitVerdict::ApparentlyFinite) {
    out.contradiction = true;
    out.note = "both sequences look finite, which the coupled system rules out";
  } else if (out.a.limit || out.b.limit) {
    out.note = "one finite limit: companion_ratio and tail_ratio should approach 1";
  }
  return out;
}

std::vector<double> abelian_average(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("abelian_average: empty input");
  std::vector<double> out;
  out.reserve(values.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc.add(values[i]);
    out.push_back(acc.value() / static_cast<double>(i + 1));
  }
  return out;
}

}  // namespace limitforge
