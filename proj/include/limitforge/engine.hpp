#pragma once

// Iteration of the recurrence families, sampled at checkpoints.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "limitforge/funcdsl.hpp"

namespace limitforge {

/// a_{n+1} = a_n + 1/(f(a_n) g(n)); g defaults to 1.
struct FirstOrderInverse {
  FunctionExpr f;
  std::optional<FunctionExpr> g;
  double a1 = 1.0;
};

/// a_{n+1} = a_n + A_n/a_n, A_n = a_1 + ... + a_n.
struct CumulativeSecondOrder {
  double a1 = 1.0;
};

/// a_n chosen so that a_n^p (a_1^q + ... + a_n^q) = 1 at every n.
struct TauberianGenerator {
  int p = 1;
  int q = 2;
};

/// a_{n+1} - a_n = 1/b_n^2, b_{n+1} - b_n = 1/a_n^2.
struct Coupled {
  double a1 = 1.0;
  double b1 = 1.0;
};

/// x_{n+1} = x_n - x_n^2 with 0 < x_1 < 1.
struct QuadraticMap {
  double x1 = 0.5;
};

enum class Driver { Constant, SineSquared };

/// a_{n+1} = a_n + d(n)/a_n with d = 1 or d(n) = sin^2 n.
struct DrivenSqrt {
  Driver driver = Driver::Constant;
  double a1 = 1.0;
};

using RecurrenceSpec = std::variant<FirstOrderInverse, CumulativeSecondOrder, TauberianGenerator,
                                    Coupled, QuadraticMap, DrivenSqrt>;

std::string family_name(const RecurrenceSpec& spec);
std::string describe(const RecurrenceSpec& spec);

/// Throws std::invalid_argument when initial data or f, g violate the
/// family's hypotheses.
void validate(const RecurrenceSpec& spec);

/// Indices at which a trajectory is sampled. Every schedule includes 1 and n_max.
class CheckpointSchedule {
 public:
  enum class Kind { Standard, Decades, Every, Explicit };

  /// {1, 2, 5} x 10^k
  static CheckpointSchedule standard();
  static CheckpointSchedule decades();
  static CheckpointSchedule every();
  static CheckpointSchedule explicit_points(std::vector<std::int64_t> points);
  /// "default" | "standard" | "decades" | "every" | comma-separated indices.
  static CheckpointSchedule parse(std::string_view text);

  /// Throws std::invalid_argument when an explicit point exceeds n_max.
  std::vector<std::int64_t> points(std::int64_t n_max) const;

  Kind kind() const { return kind_; }
  const std::vector<std::int64_t>& explicit_list() const { return explicit_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Standard;
  std::vector<std::int64_t> explicit_;
};

struct Trajectory {
  RecurrenceSpec spec;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> values;
  /// b_n for Coupled; empty otherwise.
  std::vector<double> secondary;
  /// A_n for CumulativeSecondOrder and TauberianGenerator, sum of d(k) for
  /// k < n for DrivenSqrt; empty otherwise.
  std::vector<double> aux;
  /// Values at n - 1 for each checkpoint n (NaN at n = 1).
  std::vector<double> previous;
  std::vector<double> previous_secondary;
  std::vector<double> previous_aux;
  std::optional<std::int64_t> terminated_at;
  std::string termination_reason;

  bool has_secondary() const { return !secondary.empty(); }
  bool has_aux() const { return !aux.empty(); }
  std::size_t size() const { return checkpoints.size(); }
};

inline constexpr double overflow_threshold = 1e300;

/// Applies the update rule n_max - 1 times. Running sums are compensated.
Trajectory iterate(const RecurrenceSpec& spec, std::int64_t n_max,
                   const CheckpointSchedule& schedule = CheckpointSchedule::standard());

Trajectory generate_tauberian(int p, int q, std::int64_t n_max,
                              const CheckpointSchedule& schedule = CheckpointSchedule::standard());

/// Positive root of a^p (partial + a^q) = 1 within [0, upper], to relative 1e-14.
double tauberian_root(int p, int q, double partial, double upper);

struct IdentityAudit {
  double max_relative_discrepancy = 0.0;
  std::int64_t worst_checkpoint = 0;
  std::size_t pairs_checked = 0;
};

/// Re-derives both sides of the step identity linking n-1 and n at every
/// checkpoint n >= 2:
///   a_n^2 - a_{n-1}^2 = 2 + 1/a_{n-1}^2                  (f = t)
///   a_n^3 - a_{n-1}^3 = 3aA + 3A^2/a + A^3/a^3, at n - 1  (cumulative)
/// Throws std::invalid_argument for other families.
IdentityAudit identity_audit(const Trajectory& traj);

/// One inequality checked at every eligible checkpoint.
struct AuditCheck {
  explicit AuditCheck(std::string check_name = {}) : name(std::move(check_name)) {}

  std::string name;
  bool passed = true;
  std::optional<std::int64_t> first_violation;
  /// Smallest (lhs - rhs) / |rhs| seen; negative on violation.
  double min_slack = INFINITY;
  std::size_t checked = 0;

  /// Checks lhs >= rhs (lhs > rhs when strict).
  void record(std::int64_t n, double lhs, double rhs, bool strict = false);
};

struct AuditReport {
  std::string family;
  std::vector<AuditCheck> checks;

  bool passed() const;
};

}  // namespace limitforge
