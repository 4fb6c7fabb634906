#pragma once

// Harmonic-type partial sums. The scalar routine is the reference; the AVX2
// routine computes the same per-term values (1/k is correctly rounded in both)
// and differs only in the order the compensated lanes are folded together.

#include <cstdint>

namespace limitforge::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

/// True when the binary carries the AVX2 kernels and the CPU supports them.
bool avx2_available();

/// ISA used by the dispatching entry points. LIMITFORGE_ISA=scalar forces the
/// reference path.
Isa selected_isa();

/// Compensated sum of 1/k for k in [first, last]; 0 when last < first.
double reciprocal_sum(std::uint64_t first, std::uint64_t last);

double reciprocal_sum_scalar(std::uint64_t first, std::uint64_t last);

#if defined(LIMITFORGE_HAVE_AVX2)
double reciprocal_sum_avx2(std::uint64_t first, std::uint64_t last);
#endif

}  // namespace limitforge::kernels
