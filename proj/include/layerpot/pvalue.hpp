#pragma once

#include <functional>
#include <string>
#include <vector>

#include "layerpot/types.hpp"

namespace layerpot {

// Surface measure of the unit sphere in R^dim (dim >= 1; the two-point
// 0-sphere counts as measure 2).
double sphere_measure(int dim);

// Height function eta -> gamma(eta) on the ball |eta| < r, bounded,
// differentiable at 0 with gamma(0) = 0.  `a` is the gradient at 0 and q01
// the sampled sup of |gamma(eta)| / |eta| over the domain.
struct GraphFunction {
  int dim = 0;
  double r = 1.0;
  std::string id;
  std::function<double(const RVec&)> gamma;
  RVec a;
  double q01 = 0.0;
};

// Built-in family: "zero", "linear" (a.eta), "quad" (|eta|^2),
// "mixed" (a.eta + |eta|^2), "power" (a.eta + |eta|^{1+alpha}).
// `a` defaults to zero; `alpha` only affects "power".
GraphFunction make_graph_function(const std::string& id, int dim, const RVec& a = {},
                                  double alpha = 1.0, double r = 1.0);

// Truncation regions: the graph region {|eta|^2 + gamma(eta)^2 < eps^2} and
// its linearization {|eta|^2 + (a.eta)^2 < eps^2}.
struct RegionMembership {
  bool inGamma = false;
  bool inA = false;
};

RegionMembership region_membership(const GraphFunction& gf, double eps, const RVec& eta);

// Sampled sup of |gamma(eta) - a.eta| / |eta| over the punctured ball of
// radius eps (running max over a radial-angular grid, refined until stable;
// a lower bound of the true modulus).
double alpha_modulus(const GraphFunction& gf, double eps);

// Integrand with a singularity at 0 only; cg bounds |eta|^dim |g(eta)| over
// the domain ball, supplied analytically for the built-ins.
struct SingularIntegrand {
  int dim = 0;
  std::string id;
  std::function<double(const RVec&)> eval;
  double cg = 0.0;
};

// Built-ins: "riesz-odd" (eta_1 / |eta|^{dim+1}), "weak" (|eta|^{1-dim}),
// "critical" (|eta|^{-dim}).
SingularIntegrand make_singular_integrand(const std::string& id, int dim, double r = 1.0);

// Reference polar quadrature for the region integrals: rays from the origin,
// region boundary located per ray by bisection, geometric radial cells from
// the boundary outward, dyadic refinement across levels.
struct PolarGridConfig {
  int angular = 512;
  int radial = 2048;
  int levels = 3;
};

struct TruncationComparison {
  double eps = 0.0;
  double alphaEps = 0.0;
  double integralGamma = 0.0;  // over the domain ball minus the graph region
  double integralA = 0.0;      // over the domain ball minus the linearized region
  double lhs = 0.0;            // |difference|, integrated directly over the gap
  double cg = 0.0;
  double boundB = 0.0;  // cg s_dim (log(1 + alpha) + log sqrt(1 + |a|^2))
  double boundC = 0.0;  // cg s_dim (log(1 + alpha) + log 1/sqrt(1 - 2 alpha))
  bool hasBoundC = false;  // boundC needs alpha < 1/2
  bool okB = false;
  bool okC = false;
  double refinementError = 0.0;  // movement of lhs at the last refinement
};

TruncationComparison truncated_difference(const GraphFunction& gf, const SingularIntegrand& g,
                                          double eps, const PolarGridConfig& grid = {});

// Truncated integrals along a decreasing eps sequence for both region
// families.  The difference trace is integrated directly (never as a
// difference of two large truncations).  Cauchy flags mark whether each
// trace settles; a principal value exists exactly when they do, and then
// both limits agree.
struct PvTrace {
  std::vector<double> eps;
  std::vector<double> gammaTrace;
  std::vector<double> aTrace;
  std::vector<double> diffTrace;
  bool gammaCauchy = false;
  bool aCauchy = false;
  double limitGamma = 0.0;
  double limitA = 0.0;
};

PvTrace pv_convergence(const GraphFunction& gf, const SingularIntegrand& g,
                       const std::vector<double>& epsSeq, const PolarGridConfig& grid = {});

}  // namespace layerpot
