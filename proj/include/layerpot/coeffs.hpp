#pragma once

#include <functional>
#include <string>

#include "layerpot/linalg.hpp"
#include "layerpot/types.hpp"

namespace layerpot {

// Constant coefficients of a second-order operator
//   P[u] = sum_{l,j} a2[l][j] d_l d_j u + sum_l a1[l] d_l u + a0 u,
// with a2 real symmetric and a1, a0 complex.
struct CoefficientVector {
  int n = 0;
  RMat a2;
  CVec a1;
  Cplx a0 = 0.0;
};

struct ValidationReport {
  bool ok = false;
  double minEigenvalue = 0.0;
  std::string message;
};

// Factorization a2 = T T^t with T lower triangular.
struct Factorization {
  RMat T;
  RMat Tinv;
  double detA2 = 0.0;   // (prod diag T)^2
  double opNormT = 0.0;  // spectral norm of T = sqrt(lambda_max(a2))
};

// Scalar field probe for apply_operator.  Only `value` is required; missing
// derivative callbacks fall back to central differences with step
// h = fd_scale * (1 + |x|).
struct FieldProbe {
  std::function<Cplx(const RVec&)> value;
  std::function<CVec(const RVec&)> gradient;                 // optional
  std::function<Cplx(const RVec&, int, int)> second;         // optional, d_i d_j
  double fd_scale = 1e-5;
};

ValidationReport validate(const CoefficientVector& a);

// Requires validate(a).ok; throws ConfigError otherwise.
Factorization factorize(const CoefficientVector& a);

Cplx apply_operator(const CoefficientVector& a, const FieldProbe& u, const RVec& x);

// Built-in operators.  `k` is the Helmholtz wavenumber and is ignored by the
// others.  Names: laplace2d, laplace3d, helmholtz2d, helmholtz3d, aniso2d.
CoefficientVector preset_operator(const std::string& name, double k = 1.0);

}  // namespace layerpot
