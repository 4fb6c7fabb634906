#include "limitforge/compensated.hpp"
#include "limitforge/kernels.hpp"

namespace limitforge::kernels {

double reciprocal_sum_scalar(std::uint64_t first, std::uint64_t last) {
  if (first == 0) first = 1;
  if (last < first) return 0.0;
  CompensatedSum acc;
  for (std::uint64_t k = first; k <= last; ++k) acc.add(1.0 / static_cast<double>(k));
  return acc.value();
}

}  // namespace limitforge::kernels
