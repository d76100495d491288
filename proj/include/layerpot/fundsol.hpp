#pragma once

#include <functional>

#include "layerpot/coeffs.hpp"
#include "layerpot/linalg.hpp"
#include "layerpot/types.hpp"

namespace layerpot {

using CMat = std::vector<CVec>;  // small complex matrix, rows

// Fundamental solution S_n of the Laplacian: log|x|/(2 pi) in the plane,
// |x|^{2-n} / ((2-n) s_n) for n >= 3.
double laplace_fund(int n, const RVec& x);
RVec laplace_fund_gradient(int n, const RVec& x);

// Singular-expansion components of a fundamental solution S about x = 0:
//
//   S(x)  = P(x) + |x|^{3-n} A1(x/|x|, |x|) + (B1(x) + b0 [n != 2]) ln|x| + C(x)
//   DS(x) = DP(x) + |x|^{2-n} A2(x/|x|, |x|) + DB1(x) ln|x| + DC(x)
//
// with P(x) = S_n(T^{-1}x)/sqrt(det a2) the principal part, A1(.,0) odd,
// A2(.,0) even, and B1, C analytic with B1(0) = 0.  A1 and A2 live on
// sphere x radius; dA2_dy differentiates the radial extension
// A2(x/|x|, r) in x and is evaluated on the unit sphere.
//
// Unset callbacks mean "identically zero", except the derivative slots, which
// fall back to central differences of the parent quantity (step 1e-6).
struct DecompositionComponents {
  std::function<Cplx(const RVec& theta, double r)> A1;
  std::function<CVec(const RVec& theta, double r)> A2;
  std::function<CMat(const RVec& theta, double r)> dA2_dy;  // [i][j] = d A2_i / d y_j
  std::function<CVec(const RVec& theta, double r)> dA2_dr;
  Cplx b0 = 0.0;
  std::function<Cplx(const RVec& x)> B1;
  std::function<CVec(const RVec& x)> DB1;
  std::function<CMat(const RVec& x)> HessB1;
  std::function<Cplx(const RVec& x)> C;
  std::function<CVec(const RVec& x)> DC;
  std::function<CMat(const RVec& x)> HessC;
};

struct FundamentalSolution {
  CoefficientVector a;
  Factorization fact;
  double sn = 0.0;  // measure of the unit sphere in R^n
  DecompositionComponents comp;

  // Closed-form shortcuts; when empty, value/gradient use the component
  // assembly above.  gradient_override exists for degenerate test doubles.
  std::function<Cplx(const RVec&)> value_override;
  std::function<CVec(const RVec&)> gradient_override;

  int n() const { return a.n; }

  Cplx value(const RVec& x) const;
  CVec gradient(const RVec& x) const;

  Cplx principal_part(const RVec& x) const;
  CVec principal_gradient(const RVec& x) const;

  // Component accessors with zero defaults and finite-difference fallbacks.
  Cplx A1(const RVec& theta, double r) const;
  CVec A2(const RVec& theta, double r) const;
  CMat dA2_dy(const RVec& theta, double r) const;
  CVec dA2_dr(const RVec& theta, double r) const;
  Cplx B1(const RVec& x) const;
  CVec DB1(const RVec& x) const;
  CMat HessB1(const RVec& x) const;
  Cplx Cpart(const RVec& x) const;
  CVec DC(const RVec& x) const;
  CMat HessC(const RVec& x) const;

  bool has_lower_order() const { return static_cast<bool>(comp.A1) || static_cast<bool>(comp.B1) || static_cast<bool>(comp.C); }
};

// Built-in fundamental solutions keyed on the coefficients:
//  - a1 = 0, a0 = 0, any admissible a2: pure principal part;
//  - a2 = I, a1 = 0, a0 = k^2 > 0: Helmholtz.  In the plane the value is
//    -(i/4) H^(1)_0(k|x|) evaluated by power series; in space it is
//    -exp(ik|x|)/(4 pi |x|).  Both have P S = +delta.
// Other coefficient combinations have no built-in and throw ConfigError;
// custom operators supply DecompositionComponents programmatically.
FundamentalSolution make_fundamental_solution(const CoefficientVector& a);

// Assembles a FundamentalSolution from explicit components (plugin path).
FundamentalSolution make_from_components(const CoefficientVector& a, DecompositionComponents comp);

CMat czeros(int n);

}  // namespace layerpot
