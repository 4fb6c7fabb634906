#include "limitforge/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "limitforge/compensated.hpp"

namespace limitforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Sample {
  double value;
  double secondary;
  double aux;
};

bool overflowed(const Sample& s) {
  auto bad = [](double x) { return !std::isnan(x) && !(std::fabs(x) <= overflow_threshold); };
  return bad(s.value) || bad(s.secondary) || bad(s.aux) || std::isnan(s.value);
}

// Drives a family state through n = 1..n_max, sampling at the checkpoints.
// State provides current() -> Sample and advance(n) taking n to n + 1.
template <class State>
Trajectory run(const RecurrenceSpec& spec, std::int64_t n_max, const CheckpointSchedule& schedule,
               State state, bool with_secondary, bool with_aux) {
  if (n_max < 1) throw std::invalid_argument("iterate: n_max must be >= 1");
  const std::vector<std::int64_t> points = schedule.points(n_max);

  Trajectory traj{spec, {}, {}, {}, {}, {}, {}, {}, std::nullopt, {}};
  traj.checkpoints.reserve(points.size());
  traj.values.reserve(points.size());

  Sample prev{kNaN, kNaN, kNaN};
  std::size_t next = 0;
  for (std::int64_t n = 1;; ++n) {
    const Sample cur = state.current();
    if (next < points.size() && points[next] == n) {
      traj.checkpoints.push_back(n);
      traj.values.push_back(cur.value);
      traj.previous.push_back(prev.value);
      if (with_secondary) {
        traj.secondary.push_back(cur.secondary);
        traj.previous_secondary.push_back(prev.secondary);
      }
      if (with_aux) {
        traj.aux.push_back(cur.aux);
        traj.previous_aux.push_back(prev.aux);
      }
      ++next;
    }
    if (n >= n_max) break;
    prev = cur;
    state.advance(n);
    if (overflowed(state.current())) {
      traj.terminated_at = n + 1;
      traj.termination_reason = "overflow";
      break;
    }
  }
  return traj;
}

struct FirstOrderState {
  const FirstOrderInverse* spec;
  double a;
  Sample current() const { return {a, kNaN, kNaN}; }
  void advance(std::int64_t n) {
    const double fa = spec->f.evaluate(a);
    const double gn = spec->g ? spec->g->evaluate(static_cast<double>(n)) : 1.0;
    const double denom = fa * gn;
    if (!(denom > 0.0)) {
      throw DomainError("f(a)*g(n)", a, "non-positive step denominator at n=" + std::to_string(n));
    }
    a = a + 1.0 / denom;
  }
};

struct CumulativeState {
  double a;
  CompensatedSum partial;
  Sample current() const { return {a, kNaN, partial.value()}; }
  void advance(std::int64_t) {
    a = a + partial.value() / a;
    partial.add(a);
  }
};

struct TauberianState {
  int p, q;
  double a;
  CompensatedSum partial;
  Sample current() const { return {a, kNaN, partial.value()}; }
  void advance(std::int64_t) {
    a = tauberian_root(p, q, partial.value(), std::fmin(1.0, a));
    partial.add(ipow(a, q));
  }
};

struct CoupledState {
  double a, b;
  Sample current() const { return {a, b, kNaN}; }
  void advance(std::int64_t) {
    const double na = a + 1.0 / (b * b);
    const double nb = b + 1.0 / (a * a);
    a = na;
    b = nb;
  }
};

struct QuadraticState {
  double x;
  Sample current() const { return {x, kNaN, kNaN}; }
  void advance(std::int64_t) { x = x - x * x; }
};

struct DrivenState {
  Driver driver;
  double a;
  CompensatedSum mass;
  Sample current() const { return {a, kNaN, mass.value()}; }
  void advance(std::int64_t n) {
    double d = 1.0;
    if (driver == Driver::SineSquared) {
      const double s = std::sin(static_cast<double>(n));
      d = s * s;
    }
    mass.add(d);
    a = a + d / a;
  }
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite, got " + fmt(v));
  }
}

}  // namespace

std::string family_name(const RecurrenceSpec& spec) {
  return std::visit(overloaded{
                        [](const FirstOrderInverse&) { return std::string("first_order_inverse"); },
                        [](const CumulativeSecondOrder&) { return std::string("cumulative_second_order"); },
                        [](const TauberianGenerator&) { return std::string("tauberian"); },
                        [](const Coupled&) { return std::string("coupled"); },
                        [](const QuadraticMap&) { return std::string("quadratic_map"); },
                        [](const DrivenSqrt&) { return std::string("driven_sqrt"); },
                    },
                    spec);
}

std::string describe(const RecurrenceSpec& spec) {
  return std::visit(
      overloaded{
          [](const FirstOrderInverse& s) {
            std::string g = s.g ? " * g(n)), g(t) = " + s.g->render() : ")";
            return "a(n+1) = a(n) + 1/(f(a(n))" + g + ", f(t) = " + s.f.render() +
                   ", a1 = " + fmt(s.a1);
          },
          [](const CumulativeSecondOrder& s) {
            return "a(n+1) = a(n) + A(n)/a(n), a1 = " + fmt(s.a1);
          },
          [](const TauberianGenerator& s) {
            return "a(n)^" + std::to_string(s.p) + " * sum a(k)^" + std::to_string(s.q) + " = 1";
          },
          [](const Coupled& s) {
            return "a(n+1) = a(n) + 1/b(n)^2, b(n+1) = b(n) + 1/a(n)^2, a1 = " + fmt(s.a1) +
                   ", b1 = " + fmt(s.b1);
          },
          [](const QuadraticMap& s) { return "x(n+1) = x(n) - x(n)^2, x1 = " + fmt(s.x1); },
          [](const DrivenSqrt& s) {
            return std::string("a(n+1) = a(n) + ") +
                   (s.driver == Driver::Constant ? "1" : "sin(n)^2") + "/a(n), a1 = " + fmt(s.a1);
          },
      },
      spec);
}

void validate(const RecurrenceSpec& spec) {
  std::visit(overloaded{
                 [](const FirstOrderInverse& s) {
                   require_positive(s.a1, "a1");
                   const double hi = std::fmax(1e6, 1e3 * s.a1);
                   const auto fv = check_hypotheses(s.f, s.a1, hi, 200);
                   if (!fv.positive_on_samples || !(s.f.evaluate(s.a1) > 0.0)) {
                     throw std::invalid_argument("f = " + s.f.render() +
                                                 " is not positive on [a1, " + fmt(hi) + "]");
                   }
                   if (!fv.non_decreasing_on_samples) {
                     throw std::invalid_argument("f = " + s.f.render() +
                                                 " is not non-decreasing on [a1, " + fmt(hi) + "]");
                   }
                   if (s.g) {
                     const auto gv = check_hypotheses(*s.g, 1.0, 1e6, 200);
                     if (!gv.positive_on_samples || !(s.g->evaluate(1.0) > 0.0)) {
                       throw std::invalid_argument("g = " + s.g->render() +
                                                   " is not positive on [1, 1e6]");
                     }
                   }
                 },
                 [](const CumulativeSecondOrder& s) { require_positive(s.a1, "a1"); },
                 [](const TauberianGenerator& s) {
                   if (s.p < 1 || s.q < 1) {
                     throw std::invalid_argument("tauberian: p and q must be positive integers");
                   }
                 },
                 [](const Coupled& s) {
                   require_positive(s.a1, "a1");
                   require_positive(s.b1, "b1");
                 },
                 [](const QuadraticMap& s) {
                   if (!(s.x1 > 0.0 && s.x1 < 1.0)) {
                     throw std::invalid_argument("quadratic map requires 0 < x1 < 1, got " +
                                                 fmt(s.x1));
                   }
                 },
                 [](const DrivenSqrt& s) { require_positive(s.a1, "a1"); },
             },
             spec);
}

CheckpointSchedule CheckpointSchedule::standard() { return {}; }

CheckpointSchedule CheckpointSchedule::decades() {
  CheckpointSchedule s;
  s.kind_ = Kind::Decades;
  return s;
}

CheckpointSchedule CheckpointSchedule::every() {
  CheckpointSchedule s;
  s.kind_ = Kind::Every;
  return s;
}

CheckpointSchedule CheckpointSchedule::explicit_points(std::vector<std::int64_t> points) {
  for (auto p : points) {
    if (p < 1) throw std::invalid_argument("checkpoints must be >= 1");
  }
  CheckpointSchedule s;
  s.kind_ = Kind::Explicit;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  s.explicit_ = std::move(points);
  return s;
}

CheckpointSchedule CheckpointSchedule::parse(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '[')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == ']')) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  if (text == "default" || text == "standard" || text == "125") return standard();
  if (text == "decades") return decades();
  if (text == "every") return every();
  std::vector<std::int64_t> points;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() ||
        value != std::floor(value) || value < 1 || value > 9.0e15) {
      throw std::invalid_argument("bad checkpoint schedule entry '" + std::string(item) + "'");
    }
    points.push_back(static_cast<std::int64_t>(value));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (points.empty()) throw std::invalid_argument("empty checkpoint schedule");
  return explicit_points(std::move(points));
}

std::vector<std::int64_t> CheckpointSchedule::points(std::int64_t n_max) const {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<std::int64_t> out{1};
  switch (kind_) {
    case Kind::Standard:
    case Kind::Decades:
      for (std::int64_t decade = 1; decade <= n_max; decade *= 10) {
        for (std::int64_t m : {1, 2, 5}) {
          if (kind_ == Kind::Decades && m != 1) continue;
          const std::int64_t p = m * decade;
          if (p <= n_max) out.push_back(p);
        }
        if (decade > n_max / 10) break;
      }
      break;
    case Kind::Every:
      out.resize(static_cast<std::size_t>(n_max));
      for (std::int64_t i = 0; i < n_max; ++i) out[static_cast<std::size_t>(i)] = i + 1;
      break;
    case Kind::Explicit:
      for (auto p : explicit_) {
        if (p > n_max) {
          throw std::invalid_argument("checkpoint " + std::to_string(p) + " exceeds n_max " +
                                      std::to_string(n_max));
        }
        out.push_back(p);
      }
      break;
  }
  out.push_back(n_max);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string CheckpointSchedule::describe() const {
  switch (kind_) {
    case Kind::Standard: return "standard";
    case Kind::Decades: return "decades";
    case Kind::Every: return "every";
    case Kind::Explicit: {
      std::string s;
      for (std::size_t i = 0; i < explicit_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(explicit_[i]);
      }
      return s;
    }
  }
  return {};
}

double tauberian_root(int p, int q, double partial, double upper) {
  auto h = [&](double a) { return ipow(a, p) * (partial + ipow(a, q)) - 1.0; };
  auto dh = [&](double a) {
    return p * ipow(a, p - 1) * (partial + ipow(a, q)) + q * ipow(a, p + q - 1);
  };

  double lo = 0.0;
  double hi = upper;
  for (int widen = 0; h(hi) < 0.0; ++widen) {
    if (widen > 64) throw std::runtime_error("tauberian: root bracketing failure");
    hi = hi * (1.0 + 1e-12) + 1e-300;
  }
  if (h(hi) == 0.0) return hi;

  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double hx = h(x);
    if (hx == 0.0) return x;
    (hx < 0.0 ? lo : hi) = x;
    double next = x - hx / dh(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 1e-14 * x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return x;
}

Trajectory iterate(const RecurrenceSpec& spec, std::int64_t n_max,
                   const CheckpointSchedule& schedule) {
  validate(spec);
  return std::visit(
      overloaded{
          [&](const FirstOrderInverse& s) {
            return run(spec, n_max, schedule, FirstOrderState{&s, s.a1}, false, false);
          },
          [&](const CumulativeSecondOrder& s) {
            return run(spec, n_max, schedule, CumulativeState{s.a1, CompensatedSum(s.a1)}, false,
                       true);
          },
          [&](const TauberianGenerator& s) { return generate_tauberian(s.p, s.q, n_max, schedule); },
          [&](const Coupled& s) {
            return run(spec, n_max, schedule, CoupledState{s.a1, s.b1}, true, false);
          },
          [&](const QuadraticMap& s) {
            return run(spec, n_max, schedule, QuadraticState{s.x1}, false, false);
          },
          [&](const DrivenSqrt& s) {
            return run(spec, n_max, schedule, DrivenState{s.driver, s.a1, {}}, false, true);
          },
      },
      spec);
}

Trajectory generate_tauberian(int p, int q, std::int64_t n_max,
                              const CheckpointSchedule& schedule) {
  const RecurrenceSpec spec = TauberianGenerator{p, q};
  validate(spec);
  TauberianState state{p, q, tauberian_root(p, q, 0.0, 1.0), {}};
  state.partial.add(ipow(state.a, q));
  return run(spec, n_max, schedule, state, false, true);
}

IdentityAudit identity_audit(const Trajectory& traj) {
  enum class Form { Squared, Cubic };
  Form form;
  if (const auto* s = std::get_if<FirstOrderInverse>(&traj.spec)) {
    const auto m = s->f.as_monomial();
    if (s->g || !m || m->coefficient != 1.0 || m->power != 1.0) {
      throw std::invalid_argument("identity_audit: first-order family needs f = t without g");
    }
    form = Form::Squared;
  } else if (std::holds_alternative<CumulativeSecondOrder>(traj.spec)) {
    form = Form::Cubic;
  } else {
    throw std::invalid_argument("identity_audit: no step identity for family " +
                                family_name(traj.spec));
  }

  IdentityAudit audit;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double prev = traj.previous[i];
    const double cur = traj.values[i];
    if (std::isnan(prev)) continue;
    // cur - prev is exact (Sterbenz) for the step sizes of both families.
    const double d = cur - prev;
    double lhs, rhs;
    if (form == Form::Squared) {
      lhs = d * (cur + prev);
      rhs = 2.0 + 1.0 / (prev * prev);
    } else {
      const double A = traj.previous_aux[i];
      lhs = d * (cur * cur + cur * prev + prev * prev);
      rhs = 3.0 * prev * A + 3.0 * A * A / prev + (A * A * A) / (prev * prev * prev);
    }
    const double rel = std::fabs(lhs - rhs) / std::fmax(std::fabs(lhs), std::fabs(rhs));
    if (audit.pairs_checked == 0 || rel > audit.max_relative_discrepancy) {
      audit.max_relative_discrepancy = rel;
      audit.worst_checkpoint = traj.checkpoints[i];
    }
    ++audit.pairs_checked;
  }
  return audit;
}

void AuditCheck::record(std::int64_t n, double lhs, double rhs, bool strict) {
  ++checked;
  const double scale = std::fabs(rhs) > 0.0 ? std::fabs(rhs) : 1.0;
  const double slack = (lhs - rhs) / scale;
  min_slack = std::fmin(min_slack, slack);
  const bool ok = strict ? lhs > rhs : lhs >= rhs;
  if (!ok && passed) {
    passed = false;
    first_violation = n;
  }
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

}  // namespace limitforge
