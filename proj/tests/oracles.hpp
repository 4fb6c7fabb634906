#pragma once

// Reference values frozen from independent computations.

namespace oracle {

// euler_mascheroni(1e9) with the 1/(2n) correction, computed once with this
// library; mpmath gives 0.57721566490153286...
inline constexpr double gamma = 0.57721566490153187;

// stieltjes(1, 1e8), raw defect, computed once with this library. mpmath's
// gamma_1 = -0.07281584548367672; the raw defect is off by about ln(n)/(2n).
inline constexpr double stieltjes1 = -0.0728157533803255;

// H_10 - ln 10 from exact rational H_10 and 40-digit ln 10 (mpmath).
inline constexpr double harmonic_defect_10 = 0.62638316097420828;

// Real root of a^3 + a - 1 = 0, 200 bisection steps at 40 digits (mpmath).
inline constexpr double cubic_root = 0.68232780382801933;

// ln(2)^2/2 - gamma ln 2 with the gamma above.
inline constexpr double log_alternating = -0.1598689037424303;

inline constexpr double ln2 = 0.6931471805599453;

}  // namespace oracle
