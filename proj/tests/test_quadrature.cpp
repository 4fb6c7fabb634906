#include <cmath>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "limitforge/compensated.hpp"
#include "limitforge/kernels.hpp"
#include "limitforge/quadrature.hpp"

using namespace limitforge;

TEST_CASE("two_sum is error free") {
  const auto r = two_sum(1.0, 1e-20);
  CHECK(r.sum == 1.0);
  CHECK(r.error == 1e-20);
  CompensatedSum s;
  for (int i = 0; i < 10; ++i) s.add(0.1);
  CHECK(s.value() == 1.0);
}

TEST_CASE("adaptive simpson integrates known integrals") {
  auto r = integrate([](double t) { return 1.0 / t; }, 1.0, 2.0, {1e-14, 0.0});
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  r = integrate([](double t) { return std::exp(t); }, 0.0, 1.0, {1e-13, 0.0});
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  r = integrate([](double t) { return t * t; }, 0.0, 3.0, {1e-12, 0.0});
  CHECK(r.value == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0, {}).value == 0.0);
}

TEST_CASE("panels stream left to right and tile the interval") {
  AdaptiveSimpson q([](double t) { return std::sqrt(t); }, {1e-10, 0.0}, 100000);
  q.begin(0.0, 4.0);
  double edge = 0.0;
  CompensatedSum total;
  while (auto p = q.next()) {
    CHECK(p->left == edge);
    edge = p->right;
    total.add(p->value);
  }
  CHECK(edge == 4.0);
  CHECK(total.value() == doctest::Approx(16.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("budget exhaustion raises with the worst panel") {
  try {
    integrate([](double t) { return std::sin(1.0 / t); }, 1e-6, 1.0, {1e-15, 0.0}, 10);
    FAIL("no error");
  } catch (const QuadratureError& e) {
    CHECK(e.worst_left() < e.worst_right());
    CHECK(e.worst_error() > 0.0);
  }
}

TEST_CASE("non-finite integrand raises") {
  CHECK_THROWS_AS(integrate([](double t) { return 1.0 / t; }, 0.0, 1.0, {}), QuadratureError);
}

TEST_CASE("panel budget honours the environment") {
  const char* env = std::getenv("LIMITFORGE_PANEL_BUDGET");
  if (env == nullptr) {
    CHECK(default_panel_budget() == 1000000);
  } else {
    CHECK(default_panel_budget() == std::strtoull(env, nullptr, 10));
  }
}

TEST_CASE("isa selection honours the environment") {
  const char* env = std::getenv("LIMITFORGE_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    CHECK(kernels::selected_isa() == kernels::Isa::Scalar);
  } else {
    CHECK(kernels::selected_isa() ==
          (kernels::avx2_available() ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
  }
}

TEST_CASE("reciprocal sums: small cases exact") {
  CHECK(kernels::reciprocal_sum_scalar(1, 1) == 1.0);
  CHECK(kernels::reciprocal_sum_scalar(1, 2) == 1.5);
  CHECK(kernels::reciprocal_sum_scalar(5, 4) == 0.0);
  CHECK(kernels::reciprocal_sum(1, 4) == doctest::Approx(25.0 / 12.0).epsilon(1e-16));
}

#if defined(LIMITFORGE_HAVE_AVX2)
TEST_CASE("avx2 and scalar reciprocal sums agree") {
  if (!kernels::avx2_available()) return;
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges = {
      {1, 1}, {1, 3}, {1, 4}, {1, 7}, {2, 9}, {3, 1000}, {1, 1000000}, {999, 1234567}, {7, 7}};
  for (auto [a, b] : ranges) {
    CAPTURE(a);
    CAPTURE(b);
    const double s = kernels::reciprocal_sum_scalar(a, b);
    const double v = kernels::reciprocal_sum_avx2(a, b);
    CHECK(std::fabs(s - v) <= 2e-16 * std::fabs(s));
  }
  CHECK(kernels::reciprocal_sum_avx2(10, 9) == 0.0);
}
#endif
