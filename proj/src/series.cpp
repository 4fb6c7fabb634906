#include "limitforge/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "limitforge/compensated.hpp"
#include "limitforge/kernels.hpp"
#include "limitforge/quadrature.hpp"

namespace limitforge {

namespace {

constexpr QuadratureTolerance kUnitTol{defect_quadrature_tolerance, 1e-18};

// Walks n = 1, 2, ... keeping f(n) + sum_{k<n} (f(k) - integral_k^{k+1} f),
// and hands the defect to `sample` at every requested n.
template <class F, class Sink>
void walk_defect(const F& f, const std::vector<std::int64_t>& at, Sink sample) {
  if (at.empty()) return;
  CompensatedSum acc;
  std::size_t next = 0;
  for (std::int64_t n = 1;; ++n) {
    const double k = static_cast<double>(n);
    const double fk = f(k);
    while (next < at.size() && at[next] == n) {
      sample(next, acc.value() + fk);
      ++next;
    }
    if (next == at.size()) break;
    // Budget applies per unit interval.
    AdaptiveSimpson<const F&> q(f, kUnitTol, default_panel_budget());
    acc.add(fk);
    acc.add(-q.integrate(k, k + 1.0).value);
  }
}

void check_points(const std::vector<std::int64_t>& at) {
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (at[i] < 1 || (i > 0 && at[i] <= at[i - 1])) {
      throw std::invalid_argument("defect checkpoints must be ascending and >= 1");
    }
  }
}

}  // namespace

DefectSequence defect_sequence(const FunctionExpr& f, std::vector<std::int64_t> checkpoints) {
  check_points(checkpoints);
  DefectSequence seq{f, std::move(checkpoints), {}, {}};
  seq.samples.resize(seq.checkpoints.size());
  seq.doubled_samples.resize(seq.checkpoints.size());
  auto plain = [&f](double t) { return f.evaluate(t); };
  auto doubled = [&f](double t) { return f.evaluate(2.0 * t); };
  walk_defect(plain, seq.checkpoints, [&](std::size_t i, double v) { seq.samples[i] = v; });
  walk_defect(doubled, seq.checkpoints,
              [&](std::size_t i, double v) { seq.doubled_samples[i] = v; });
  return seq;
}

double defect(const FunctionExpr& f, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("defect: n must be >= 1");
  double out = 0.0;
  auto plain = [&f](double t) { return f.evaluate(t); };
  walk_defect(plain, {n}, [&](std::size_t, double v) { out = v; });
  return out;
}

ConstantEstimate euler_mascheroni(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("euler_mascheroni: n must be >= 2");
  const double dn = static_cast<double>(n);
  const double h = kernels::reciprocal_sum(1, static_cast<std::uint64_t>(n));
  return {h - std::log(dn) - 1.0 / (2.0 * dn), 1.0 / (8.0 * dn * dn)};
}

double stieltjes(int alpha, std::int64_t n) {
  if (alpha < 0) throw std::invalid_argument("stieltjes: alpha must be >= 0");
  if (n < 1) throw std::invalid_argument("stieltjes: n must be >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  if (alpha == 0) return kernels::reciprocal_sum(1, static_cast<std::uint64_t>(n)) - ln_n;
  CompensatedSum acc;
  for (std::int64_t k = 2; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    acc.add(std::pow(std::log(dk), alpha) / dk);
  }
  return acc.value() - std::pow(ln_n, alpha + 1) / (alpha + 1);
}

SeriesResult sum_alternating(const FunctionExpr& f, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sum_alternating: n must be >= 1");
  const double hi = std::max(2.0 * static_cast<double>(n), 1e6);
  const auto verdict = check_hypotheses(f, 1.0, hi, 200);
  if (!verdict.positive_on_samples) {
    throw HypothesisViolation("f = " + f.render() + " is not positive on (1, " +
                              std::to_string(hi) + "]");
  }
  if (!verdict.non_increasing_from) {
    throw HypothesisViolation("f = " + f.render() + " is not eventually non-increasing");
  }
  double peak = 0.0;
  for (double t : verdict.grid) peak = std::max(peak, f.evaluate(t));
  if (!(f.evaluate(hi) <= 1e-2 * peak)) {
    throw HypothesisViolation("f = " + f.render() + " does not decay towards 0 on the samples");
  }

  double a_n = 0.0, a_2n = 0.0, b_n = 0.0;
  auto plain = [&f](double t) { return f.evaluate(t); };
  auto doubled = [&f](double t) { return f.evaluate(2.0 * t); };
  walk_defect(plain, {n, 2 * n}, [&](std::size_t i, double v) { (i == 0 ? a_n : a_2n) = v; });
  walk_defect(doubled, {n}, [&](std::size_t, double v) { b_n = v; });

  CompensatedSum direct;
  for (std::int64_t k = 1; k <= 2 * n; ++k) {
    const double v = f.evaluate(static_cast<double>(k));
    direct.add(k % 2 == 1 ? v : -v);
  }

  SeriesResult r;
  r.n_used = n;
  r.L_estimate = a_2n - 2.0 * b_n;
  r.L_alternate = a_n - 2.0 * b_n;
  r.bridge_integral = integrate(plain, 1.0, 2.0, kUnitTol).value;
  r.estimated_sum = r.L_estimate + r.bridge_integral;
  r.direct_partial_sum = direct.value();
  r.identity_residual = std::fabs(r.estimated_sum - r.direct_partial_sum);
  r.error_estimate = std::fabs(f.evaluate(2.0 * static_cast<double>(n))) + kUnitTol.relative;
  return r;
}

}  // namespace limitforge
