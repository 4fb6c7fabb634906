#include <cmath>
#include <vector>

#include "doctest.h"
#include "limitforge/series.hpp"
#include "oracles.hpp"

using namespace limitforge;

TEST_CASE("defect of 1/t") {
  const auto f = FunctionExpr::parse("1/t");
  CHECK(defect(f, 1) == 1.0);
  CHECK(defect(f, 10) == doctest::Approx(oracle::harmonic_defect_10).epsilon(1e-15));
  CHECK_THROWS_AS(defect(f, 0), std::invalid_argument);
}

TEST_CASE("defect sequence is non-increasing for decreasing f") {
  const auto seq = defect_sequence(FunctionExpr::parse("1/t"), {1, 2, 5, 10, 100, 1000, 10000});
  REQUIRE(seq.samples.size() == 7);
  for (std::size_t i = 1; i < seq.samples.size(); ++i) CHECK(seq.samples[i] <= seq.samples[i - 1]);
  CHECK(seq.samples.back() > oracle::gamma);
  // B_n = sum 1/(2k) - (ln n)/2 = A_n / 2
  for (std::size_t i = 0; i < seq.samples.size(); ++i) {
    CHECK(seq.doubled_samples[i] == doctest::Approx(seq.samples[i] / 2.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(defect_sequence(FunctionExpr::parse("1/t"), {5, 2}), std::invalid_argument);
}

TEST_CASE("euler mascheroni") {
  CHECK(euler_mascheroni(2).value == doctest::Approx(0.5568528194400547).epsilon(1e-15));
  CHECK(euler_mascheroni(10).value == doctest::Approx(0.57638316097420828).epsilon(1e-15));
  const auto big = euler_mascheroni(100000000);
  CHECK(std::fabs(big.value - oracle::gamma) <= 1e-13);
  CHECK(big.error_bound == doctest::Approx(1.0 / 8e16));
  CHECK_THROWS_AS(euler_mascheroni(1), std::invalid_argument);
}

TEST_CASE("stieltjes constants") {
  const auto f = FunctionExpr::parse("1/t");
  for (std::int64_t n : {1, 10, 1000, 100000, 1000000}) {
    CAPTURE(n);
    CHECK(std::fabs(stieltjes(0, n) - defect(f, n)) <= 1e-13);
  }
  CHECK(stieltjes(1, 1000000) == doctest::Approx(oracle::stieltjes1).epsilon(1e-4));
  CHECK_THROWS_AS(stieltjes(-1, 10), std::invalid_argument);
}

TEST_CASE("alternating sums") {
  const auto h = sum_alternating(FunctionExpr::parse("1/t"), 1000000);
  CHECK(std::fabs(h.estimated_sum - oracle::ln2) <= 1e-6);
  CHECK(h.identity_residual <= 1e-10);
  CHECK(h.n_used == 1000000);
  CHECK(h.bridge_integral == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const auto l = sum_alternating(FunctionExpr::parse("ln(t)/t"), 1000000);
  CHECK(std::fabs(l.estimated_sum - oracle::log_alternating) <= 1e-5);

  const auto q = sum_alternating(FunctionExpr::parse("1/t^2"), 1000);
  CHECK(q.estimated_sum == doctest::Approx(M_PI * M_PI / 12.0).epsilon(1e-6));
}

TEST_CASE("bridge identity corpus") {
  for (const char* text : {"1/t", "ln(t)/t", "1/t^2", "1/sqrt(t)"}) {
    for (std::int64_t n : {10, 1000, 1000000}) {
      const std::string name = text;
      CAPTURE(name);
      CAPTURE(n);
      const auto r = sum_alternating(FunctionExpr::parse(text), n);
      CHECK(r.identity_residual <= 1e-10);
    }
  }
}

TEST_CASE("hypothesis violations") {
  CHECK_THROWS_AS(sum_alternating(FunctionExpr::parse("t"), 100), HypothesisViolation);
  CHECK_THROWS_AS(sum_alternating(FunctionExpr::parse("-1/t"), 100), HypothesisViolation);
  CHECK_THROWS_AS(sum_alternating(FunctionExpr::parse("2 + sin(t)"), 100), HypothesisViolation);
  CHECK_THROWS_AS(sum_alternating(FunctionExpr::parse("1/t"), 0), std::invalid_argument);
}
