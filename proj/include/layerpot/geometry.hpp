#pragma once

#include <functional>
#include <span>
#include <string>

#include "layerpot/linalg.hpp"
#include "layerpot/types.hpp"

namespace layerpot {

// Closed C^{1,1} boundary given as an atlas of 2n axis-aligned graph patches
// with a smooth partition of unity over the overlaps.

struct ShapeSpec {
  std::string kind;  // circle | sphere | ellipse | ellipsoid | bump_sphere
  double R = 1.0;
  double a = 1.0, b = 1.0, c = 1.0;   // ellipse/ellipsoid semi-axes
  double amplitude = 0.0;             // bump_sphere
  double exponent = 2.0;              // bump profile (t - t_c)_+^exponent
};

struct QuadratureConfig {
  int angular_base = 64;     // rays per patch around the polar center (3-d)
  int radial_segments = 16;  // target skeleton segments per ray at level 0
  int gauss_order = 8;
  double singular_floor = 1e-7;  // relative radial cutoff at an on-surface center
  bool deterministic = true;
};

// One chart: psi(eta) = p + R^t (eta, gamma(eta)), local = R (x - p), outward
// normal along +t at the base point, gamma(0) = 0, Dgamma(0) = 0.
struct GraphPatch {
  int axis = 0;
  int sign = 1;
  RVec p;
  RMat R;
  double radius = 0.0;    // chart ball radius in eta
  double delta = 0.0;     // cylinder half-height; |gamma| < delta/2 on the valid cap
  double lipDGrad = 0.0;  // estimated Lipschitz constant of Dgamma
  RVec polar_scale;       // per-axis eta stretch for the quadrature fan
  double radius_zeta = 0.0;  // fan extent in stretched coordinates
  std::function<double(const RVec&)> gamma;
  std::function<RVec(const RVec&)> dgamma;
  std::function<RMat(const RVec&)> d2gamma;  // a.e. (finite differences for implicit charts)
  std::function<bool(const RVec&)> valid;    // quadrature cap; weight support lies inside
};

struct SurfacePoint {
  int patch = -1;
  RVec eta;
  RVec x;
  RVec normal;
  double metric = 1.0;  // sqrt(1 + |Dgamma|^2)
};

struct BoundarySurface {
  int n = 0;
  std::string id;
  ShapeSpec shape;
  QuadratureConfig quad;
  std::vector<GraphPatch> patches;
  double diameter = 0.0;
  double rBoundary = 0.0;     // uniform chart radius (searched, recorded)
  double c11Bound = 0.0;      // sup over patches of the C^{1,1} data bound
  double pu_threshold = 0.4;  // weight support: sign * unit_dir[axis] > threshold

  std::function<double(const RVec&)> level;        // zero on the surface, > 0 outside
  std::function<RVec(const RVec&)> level_grad;
  std::function<RVec(const RVec&)> unit_dir;       // normalized direction used by the PU
  std::function<RVec(const RVec&)> from_direction; // unit direction -> ambient surface point

  double weight(int patch, const RVec& y) const;   // PU weight, sums to 1 over patches
  RVec outward_normal(const RVec& y) const;

  SurfacePoint at(int patch, const RVec& eta) const;
  SurfacePoint from_ambient(const RVec& x) const;  // snaps x to the surface along unit_dir
  std::vector<SurfacePoint> quasi_uniform_points(int count, bool with_patch_bases) const;
};

BoundarySurface make_surface(const ShapeSpec& spec, const QuadratureConfig& quad = {});

// Graph chart of radius `radius` centered at an arbitrary surface point
// (frame from the outward normal, height function solved from the level set).
GraphPatch local_chart(const BoundarySurface& S, const RVec& x0, double radius);

// ---- quadrature --------------------------------------------------------

// Vector integrand; fills out[0..ncomp).
using Integrand = std::function<void(const SurfacePoint& y, std::span<Cplx> out)>;

struct FamilyResult {
  std::vector<double> radii;    // ascending
  CVec far;                     // integral over {|y - x| >= radii.back()}
  std::vector<CVec> annuli;     // annuli[j]: over {radii[j] <= |y - x| < radii[j+1]}
  std::vector<CVec> truncated;  // truncated[j]: over {|y - x| >= radii[j]}
};

// Integrates f over {y : |y - x| >= rho} for every rho in `radii` in one pass.
// Annulus pieces are integrated directly (no large-term cancellation) and the
// truncation boundary is located by bisection along polar rays, so each
// truncated value is a prefix sum of well-resolved pieces.
FamilyResult truncated_family(const BoundarySurface& S, const SurfacePoint& x,
                              std::vector<double> radii, int ncomp, const Integrand& f,
                              int level = 0);

CVec integrate_truncated(const BoundarySurface& S, const SurfacePoint& x, double rho,
                         int ncomp, const Integrand& f, int level = 0);

Cplx integrate_truncated(const BoundarySurface& S, const SurfacePoint& x, double rho,
                         const std::function<Cplx(const SurfacePoint&)>& f, int level = 0);

// Whole-surface integral of a bounded integrand.
Cplx integrate(const BoundarySurface& S, const std::function<Cplx(const SurfacePoint&)>& f,
               int level = 0);

double measure(const BoundarySurface& S, int level = 0);

// ---- surface differential helpers --------------------------------------

CVec tangential_project(const RVec& normal, const CVec& v);
RVec tangential_project(const RVec& normal, const RVec& v);

// Intrinsic tangential gradient of g restricted to the surface: central
// differences of g o psi in the chart, pushed forward through the metric.
// Accurate to O(h^2).
CVec surface_fd_gradient(const BoundarySurface& S, const SurfacePoint& sp,
                         const std::function<Cplx(const SurfacePoint&)>& g, double h);

std::vector<double> geometric_grid(double lo, double hi, int count);

// Gauss-Legendre nodes on [-1, 1], weights summing to 2; cached per order.
struct GlRule {
  std::vector<double> x, w;
};
const GlRule& gauss_rule(int m);

}  // namespace layerpot
