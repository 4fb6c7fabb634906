#include <immintrin.h>

#include <array>

#include "limitforge/compensated.hpp"
#include "limitforge/kernels.hpp"

namespace limitforge::kernels {

namespace {

// Lane-wise TwoSum; updates sum and accumulates the exact rounding error.
inline void two_sum_lanes(__m256d& sum, __m256d& comp, __m256d x) {
  const __m256d s = _mm256_add_pd(sum, x);
  const __m256d bp = _mm256_sub_pd(s, sum);
  const __m256d ap = _mm256_sub_pd(s, bp);
  const __m256d err = _mm256_add_pd(_mm256_sub_pd(sum, ap), _mm256_sub_pd(x, bp));
  comp = _mm256_add_pd(comp, err);
  sum = s;
}

}  // namespace

double reciprocal_sum_avx2(std::uint64_t first, std::uint64_t last) {
  if (first == 0) first = 1;
  if (last < first) return 0.0;

  const std::uint64_t count = last - first + 1;
  const std::uint64_t blocks = count / 8;

  const double f = static_cast<double>(first);
  __m256d k0 = _mm256_set_pd(f + 3.0, f + 2.0, f + 1.0, f);
  __m256d k1 = _mm256_add_pd(k0, _mm256_set1_pd(4.0));
  const __m256d step = _mm256_set1_pd(8.0);
  const __m256d one = _mm256_set1_pd(1.0);

  __m256d s0 = _mm256_setzero_pd(), c0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
  for (std::uint64_t b = 0; b < blocks; ++b) {
    two_sum_lanes(s0, c0, _mm256_div_pd(one, k0));
    two_sum_lanes(s1, c1, _mm256_div_pd(one, k1));
    k0 = _mm256_add_pd(k0, step);
    k1 = _mm256_add_pd(k1, step);
  }

  alignas(32) std::array<double, 4> lanes{};
  CompensatedSum acc;
  for (__m256d v : {s0, s1}) {
    _mm256_store_pd(lanes.data(), v);
    for (double x : lanes) acc.add(x);
  }
  for (__m256d v : {c0, c1}) {
    _mm256_store_pd(lanes.data(), v);
    for (double x : lanes) acc.add(x);
  }
  for (std::uint64_t k = first + blocks * 8; k <= last; ++k) {
    acc.add(1.0 / static_cast<double>(k));
  }
  return acc.value();
}

}  // namespace limitforge::kernels
