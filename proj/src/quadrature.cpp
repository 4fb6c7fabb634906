#include "limitforge/quadrature.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace limitforge {

namespace {

std::string describe(const std::string& what, double left, double right, double error) {
  char buf[160];
  std::snprintf(buf, sizeof buf, " (worst panel [%.17g, %.17g], error estimate %.3g)", left,
                right, error);
  return what + buf;
}

}  // namespace

QuadratureError::QuadratureError(const std::string& what, double left, double right,
                                 double error_estimate)
    : std::runtime_error(describe(what, left, right, error_estimate)),
      left_(left),
      right_(right),
      error_(error_estimate) {}

std::size_t default_panel_budget() {
  constexpr std::size_t fallback = 1'000'000;
  const char* env = std::getenv("LIMITFORGE_PANEL_BUDGET");
  if (env == nullptr) return fallback;
  std::size_t value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) return fallback;
  return value;
}

}  // namespace limitforge
