#include <cstdlib>
#include <cstring>

#include "limitforge/kernels.hpp"

namespace limitforge::kernels {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool avx2_available() {
#if defined(LIMITFORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

Isa selected_isa() {
  static const Isa isa = [] {
    const char* forced = std::getenv("LIMITFORGE_ISA");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

double reciprocal_sum(std::uint64_t first, std::uint64_t last) {
#if defined(LIMITFORGE_HAVE_AVX2)
  if (selected_isa() == Isa::Avx2) return reciprocal_sum_avx2(first, last);
#endif
  return reciprocal_sum_scalar(first, last);
}

}  // namespace limitforge::kernels
