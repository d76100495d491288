#pragma once

#include "layerpot/types.hpp"

namespace layerpot {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Power-series evaluation of the cylinder functions of order 0 and 1,
// real argument.  Terms are accumulated until |term| < 1e-16 |partial sum|.
// Intended domain |z| <= 30; larger arguments throw ConvergenceError.
double bessel_j0(double z);
double bessel_j1(double z);
double bessel_y0(double z);  // z > 0
double bessel_y1(double z);  // z > 0

}  // namespace layerpot
