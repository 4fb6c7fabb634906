#pragma once

// Trajectories against growth laws: ratio reports, trend verdicts, rate fits,
// inequality audits and the finite/infinite classifier for the coupled system.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limitforge/asymptote.hpp"
#include "limitforge/engine.hpp"

namespace limitforge {

enum class Trend { Converging, Stalled, Diverging };
enum class RateModel { Power, Logarithmic };

const char* trend_name(Trend t);
const char* rate_model_name(RateModel m);

/// |ratio - 1| ~ K n^-theta (Power) or K (ln n)^-theta (Logarithmic).
struct FittedRate {
  double theta = 0.0;
  RateModel model = RateModel::Power;
  double rss = 0.0;
  std::size_t points = 0;
};

struct ConvergenceReport {
  std::string law;
  Stream stream = Stream::Primary;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> values;
  std::vector<double> predictions;
  /// value / law(n); for SecondTerm laws (1 - n x_n) n / ln n. NaN where the
  /// law vanishes (n = 1 for logarithmic laws).
  std::vector<double> ratios;
  /// |ratio - 1| with rounding-level differences set to 0.
  std::vector<double> errors;
  double final_ratio = 0.0;
  Trend trend = Trend::Stalled;
  std::optional<FittedRate> fitted_rate;
  double tolerance_used = 0.0;

  bool passed() const { return trend == Trend::Converging; }
};

/// Throws std::invalid_argument for fewer than 3 checkpoints or an empty stream.
ConvergenceReport ratio_report(const Trajectory& traj, const GrowthLaw& law, double tolerance,
                               Stream stream = Stream::Primary);

ConvergenceReport ratio_report(const std::vector<std::int64_t>& checkpoints,
                               const std::vector<double>& values, const GrowthLaw& law,
                               double tolerance);

/// Converging when the last three errors are non-increasing and the final one
/// is within tolerance; diverging when they strictly increase past it.
Trend classify_trend(const std::vector<double>& errors, double tolerance);

/// Least squares over the points with a positive finite error and n >= 3.
std::optional<FittedRate> fit_rate(const std::vector<std::int64_t>& checkpoints,
                                   const std::vector<double>& errors);

/// Family inequalities at every checkpoint:
///   first order, f = t, a1 = 1: a_n^2 >= 2n (n >= 2), a_n^2 <= 2n + ln(n-1)/2 (n >= 3)
///   first order, other f:      the F^-1(n) bounds, see theorem_bounds_audit
///   cumulative, a1 >= 1:       a_n >= n, A_n >= n(n+1)/2, 2a_n^3 >= 3A_{n-1}^2
///   tauberian:                 |a_n^p A_n - 1| <= 1e-12
///   coupled:                   a_n^3 b_n^3 >= 9(n-1)^2
///   quadratic map:             n x_n < 1, x_n > 0
///   driven:                    a_n^2 >= a1^2 + 2 sum d(k); constant driver, a1 >= 1: a_n^2 >= 2n (n >= 2)
/// Throws std::invalid_argument when nothing is registered for the spec.
AuditReport inequality_audit(const Trajectory& traj);

enum class LimitVerdict { Diverging, ApparentlyFinite, Undetermined };

const char* limit_verdict_name(LimitVerdict v);

struct SequenceClassification {
  LimitVerdict verdict = LimitVerdict::Undetermined;
  std::optional<double> limit;
  std::string rule;
  /// n^(-1/3) x_n at the last checkpoint.
  double normalized = 0.0;
  /// (other_n / n) * limit^2, expected near 1 when this sequence is finite.
  std::optional<double> companion_ratio;
  /// n (limit - x_n) / limit^4, expected near 1 when this sequence is finite.
  std::optional<double> tail_ratio;
};

struct LimitClassification {
  SequenceClassification a;
  SequenceClassification b;
  /// Both streams look finite, which the coupled system rules out.
  bool contradiction = false;
  std::string note;
};

/// Requires a Coupled trajectory with at least 5 checkpoints.
LimitClassification classify_limits(const Trajectory& traj);

/// Running means of values, compensated.
std::vector<double> abelian_average(const std::vector<double>& values);

}  // namespace limitforge
