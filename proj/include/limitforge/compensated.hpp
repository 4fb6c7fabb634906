#pragma once

#include <cmath>

namespace limitforge {

/// Error-free transformation: a + b == sum + error exactly.
struct TwoSum {
  double sum;
  double error;
};

inline TwoSum two_sum(double a, double b) {
  const double s = a + b;
  const double bp = s - a;
  const double ap = s - bp;
  return {s, (a - ap) + (b - bp)};
}

/// Neumaier-style compensated accumulator. Order-dependent but deterministic.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) {
    const TwoSum r = two_sum(sum_, x);
    sum_ = r.sum;
    compensation_ += r.error;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + compensation_; }
  double raw_sum() const { return sum_; }
  double compensation() const { return compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace limitforge
