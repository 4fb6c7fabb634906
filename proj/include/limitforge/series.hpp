#pragma once

// Defect sequences sum f(k) - integral f, the constants they define, and
// alternating sums via L = lim (A_2n - 2 B_n).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "limitforge/funcdsl.hpp"

namespace limitforge {

class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance of the unit-interval integrals used by the defect machinery.
inline constexpr double defect_quadrature_tolerance = 1e-14;

struct DefectSequence {
  FunctionExpr f;
  std::vector<std::int64_t> checkpoints;
  /// A_n = sum_{k<=n} f(k) - integral_1^n f
  std::vector<double> samples;
  /// B_n = sum_{k<=n} f(2k) - integral_1^n f(2t) dt
  std::vector<double> doubled_samples;
};

/// Single pass up to the last checkpoint; checkpoints must be ascending and >= 1.
DefectSequence defect_sequence(const FunctionExpr& f, std::vector<std::int64_t> checkpoints);

/// A_n for a single n >= 1.
double defect(const FunctionExpr& f, std::int64_t n);

struct ConstantEstimate {
  double value = 0.0;
  double error_bound = 0.0;
};

/// H_n - ln n - 1/(2n), bound 1/(8 n^2). Requires n >= 2.
ConstantEstimate euler_mascheroni(std::int64_t n);

/// sum_{k<=n} ln^alpha(k)/k - ln^(alpha+1)(n)/(alpha+1), no acceleration.
double stieltjes(int alpha, std::int64_t n);

struct SeriesResult {
  double estimated_sum = 0.0;
  /// A_2n - 2 B_n
  double L_estimate = 0.0;
  /// A_n - 2 B_n, the second limit form
  double L_alternate = 0.0;
  double bridge_integral = 0.0;
  std::int64_t n_used = 0;
  double error_estimate = 0.0;
  /// |A_2n - 2 B_n + integral_1^2 f - sum_{k<=2n} (-1)^(k+1) f(k)|
  double identity_residual = 0.0;
  double direct_partial_sum = 0.0;
};

/// sum_{k>=1} (-1)^(k+1) f(k). Throws HypothesisViolation unless f is
/// positive, eventually non-increasing and visibly decaying on
/// [1, max(2n, 1e6)].
SeriesResult sum_alternating(const FunctionExpr& f, std::int64_t n);

}  // namespace limitforge
