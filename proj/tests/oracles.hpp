// Frozen reference values and closed-form oracles shared by the test
// binaries.  Each constant states its independent derivation; none is
// computed by the code under test.
#pragma once

#include <cmath>
#include <functional>

#include "layerpot/linalg.hpp"
#include "layerpot/types.hpp"

namespace oracles {

// Perimeter of the ellipse with semi-axes 2 and 1: 4*2*E(e) with the complete
// elliptic integral evaluated by the arithmetic-geometric mean.
inline constexpr double kEllipsePerimeter21 = 9.688448220547676;

// Abramowitz-Stegun 9.4: Bessel functions at unit argument.
inline constexpr double kJ0At1 = 0.76519768655796655;
inline constexpr double kY0At1 = 0.088256964215676956;

// Unit sphere in R^3, center x on the sphere, chord truncation at rho:
// area of {y : |y - x| >= rho} (cap height rho^2/2).
inline double sphere_far_area(double rho) {
  return layerpot::kPi * (4.0 - rho * rho);
}

// Truncated Riesz integral on the unit sphere: for k(xi) = xi_1/|xi|^3 the
// chord substitution gives  int_{|x-y| >= rho} k(x - y) dsigma_y
// = pi (2 - rho) x_1  exactly (leading coordinate of the center).
inline double sphere_riesz_truncated(double rho, double x1) {
  return layerpot::kPi * (2.0 - rho) * x1;
}

// Even control 1/|xi|^2 on the unit sphere: the same substitution gives
// pi ln(4 / rho^2), divergent as rho -> 0.
inline double sphere_even_truncated(double rho) {
  return layerpot::kPi * std::log(4.0 / (rho * rho));
}

// Closed form for the truncation-region difference with gamma = |eta|^2 and
// g = |eta|^{-2} in the plane: the regions differ in the ring rho1 < |eta| < eps
// with rho1^2 (1 + rho1^2) = eps^2, so the difference is 2 pi ln(eps/rho1).
inline double pv_quad_critical_lhs(double eps) {
  const double r1sq = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * eps * eps));
  return 2.0 * layerpot::kPi * std::log(eps / std::sqrt(r1sq));
}

// Central-difference gradient for smooth ambient fields.
inline layerpot::CVec fd_gradient(const std::function<layerpot::Cplx(const layerpot::RVec&)>& f,
                                  const layerpot::RVec& x, double h) {
  layerpot::CVec g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    layerpot::RVec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracles
