#pragma once

#include <array>
#include <string>

#include "layerpot/fundsol.hpp"
#include "layerpot/geometry.hpp"

namespace layerpot {

// Kernel positively homogeneous of degree -(n-1), Lipschitz on the unit
// sphere.  supNorm and lipConst refer to the restriction to the sphere;
// norm() is the quantity the truncation estimates are stated in.
struct HomogeneousKernel {
  int n = 0;
  std::string id;
  std::function<Cplx(const RVec&)> eval;
  double supNorm = 0.0;
  double lipConst = 0.0;
  bool isOdd = false;
  double norm() const { return supNorm + lipConst; }
};

HomogeneousKernel make_riesz_kernel(int n, int h);     // xi_h / |xi|^n
HomogeneousKernel make_even_control_kernel(int n);     // 1 / |xi|^{n-1}
HomogeneousKernel make_zero_kernel(int n);

// Sampled sup norm and Lipschitz constant on the unit sphere (lower bounds;
// sampling doubles until both change by < 1%).
std::pair<double, double> kernel_norm(const HomogeneousKernel& k, int sampleCount = 2000);

// |k(u) - k(v)| <= 2 n ||k|| |u - v| min(|u|, |v|)^{-n} for degree -(n-1).
struct CialdeaCheck {
  double lhs = 0.0, rhs = 0.0;
  bool ok = false;
};
CialdeaCheck cialdea_bound_check(const HomogeneousKernel& k, const RVec& u, const RVec& v);

// Conormal-derivative kernel of the double layer potential,
//   K(x, y) = -(a2 nu(y)) . DS(x - y) - (nu(y) . a1) S(x - y),
// evaluated between surface points (y carries the normal).
struct DoubleLayerKernel {
  FundamentalSolution fs;
  const BoundarySurface* surface = nullptr;
};

DoubleLayerKernel make_dl_kernel(FundamentalSolution fs, const BoundarySurface& S);

Cplx dl_kernel(const DoubleLayerKernel& dlk, const SurfacePoint& x, const SurfacePoint& y);

// The five-term expansion of K: principal, |d|^{2-n} A2, DB1 log, DC, and
// the first-order coefficient term.  Sums to dl_kernel up to the residual of
// the component decomposition.
std::array<Cplx, 5> dl_kernel_terms(const DoubleLayerKernel& dlk, const SurfacePoint& x,
                                    const SurfacePoint& y);

Cplx dl_potential(const DoubleLayerKernel& dlk, const std::function<Cplx(const SurfacePoint&)>& mu,
                  const SurfacePoint& x, int level = 0);

// Tangential gradient in x of K(., y), split into the nine addends of the
// analytic formula (projector applied to each addend; their sum is the total
// by construction).
struct TangentialGradient {
  CVec total;
  std::array<CVec, 9> addends;
};

TangentialGradient dl_kernel_tangential_gradient(const DoubleLayerKernel& dlk,
                                                 const SurfacePoint& x, const SurfacePoint& y);

// r |ln r| below r1 = 1/e, frozen at its maximum beyond.
double omega1(double r);

// Largest sampled difference quotient |f(x)-f(y)| / modulus(|x-y|).
enum class HolderModulus { Plain, Omega1 };
double holder_quotient(const std::vector<SurfacePoint>& points, const std::vector<CVec>& values,
                       double beta, HolderModulus modulus = HolderModulus::Plain);

}  // namespace layerpot
