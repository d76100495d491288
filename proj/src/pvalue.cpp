#include "layerpot/pvalue.hpp"

#include <algorithm>
#include <cmath>

#include "layerpot/geometry.hpp"
#include "layerpot/linalg.hpp"

namespace layerpot {

double sphere_measure(int dim) {
  if (dim < 1) throw ConfigError("sphere measure needs dim >= 1");
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

// Neumaier compensated sum (the polar reduction runs in a fixed ray order).
struct KSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double total() const { return s + c; }
};

std::vector<RVec> directions(int dim, int count) {
  std::vector<RVec> out;
  if (dim == 1) {
    out.push_back({1.0});
    out.push_back({-1.0});
    return out;
  }
  if (dim == 2) {
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * (i + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  const double ga = kPi * (3.0 - std::sqrt(5.0));  // Fibonacci sphere
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({rho * std::cos(ga * i), rho * std::sin(ga * i), z});
  }
  return out;
}

}  // namespace

GraphFunction make_graph_function(const std::string& id, int dim, const RVec& aIn, double alpha,
                                  double r) {
  if (dim < 1) throw ConfigError("graph function needs dim >= 1");
  if (!(r > 0.0)) throw ConfigError("graph domain radius must be positive");
  RVec a = aIn;
  if (a.empty()) a.assign(dim, 0.0);
  if (static_cast<int>(a.size()) != dim)
    throw ConfigError("gradient size does not match the graph dimension");
  GraphFunction gf;
  gf.dim = dim;
  gf.r = r;
  gf.id = id;
  gf.a = a;
  if (id == "zero") {
    gf.gamma = [](const RVec&) { return 0.0; };
    gf.a.assign(dim, 0.0);
  } else if (id == "linear") {
    gf.gamma = [a](const RVec& e) { return dot(a, e); };
  } else if (id == "quad") {
    gf.gamma = [](const RVec& e) { return dot(e, e); };
    gf.a.assign(dim, 0.0);
  } else if (id == "mixed") {
    gf.gamma = [a](const RVec& e) { return dot(a, e) + dot(e, e); };
  } else if (id == "power") {
    if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("power graph needs alpha in (0, 1]");
    gf.gamma = [a, alpha](const RVec& e) {
      const double rn = norm2(e);
      return dot(a, e) + std::pow(rn, 1.0 + alpha);
    };
  } else {
    throw ConfigError("unknown graph function: " + id);
  }
  const auto dirs = directions(dim, 256);
  for (int j = 1; j <= 128; ++j) {
    const double rho = r * j / 128.0;
    for (const auto& w : dirs)
      gf.q01 = std::max(gf.q01, std::abs(gf.gamma(scale(rho, w))) / rho);
  }
  return gf;
}

RegionMembership region_membership(const GraphFunction& gf, double eps, const RVec& eta) {
  if (!(eps > 0.0) || eps >= gf.r) throw ConfigError("membership needs eps in (0, r)");
  if (static_cast<int>(eta.size()) != gf.dim)
    throw ConfigError("eta dimension does not match the graph");
  const double rho2 = dot(eta, eta);
  if (rho2 >= gf.r * gf.r) throw ConfigError("eta outside the graph domain");
  const double gv = gf.gamma(eta);
  const double av = dot(gf.a, eta);
  RegionMembership out;
  out.inGamma = rho2 + gv * gv < eps * eps;
  out.inA = rho2 + av * av < eps * eps;
  return out;
}

double alpha_modulus(const GraphFunction& gf, double eps) {
  if (!(eps > 0.0) || eps > gf.r) throw ConfigError("alpha modulus needs eps in (0, r]");
  double best = 0.0, prev = -1.0;
  for (int lev = 0; lev < 3; ++lev) {
    const int nrad = 64 << lev;
    const auto dirs = directions(gf.dim, 128 << lev);
    for (int j = 1; j <= nrad; ++j) {
      const double rho = eps * j / nrad;
      for (const auto& w : dirs) {
        const RVec eta = scale(rho, w);
        best = std::max(best, std::abs(gf.gamma(eta) - dot(gf.a, eta)) / rho);
      }
    }
    if (lev > 0 && std::abs(best - prev) <= 1e-3 * std::max(best, 1e-12)) break;
    prev = best;
  }
  return best;
}

SingularIntegrand make_singular_integrand(const std::string& id, int dim, double r) {
  if (dim < 1) throw ConfigError("singular integrand needs dim >= 1");
  SingularIntegrand g;
  g.dim = dim;
  g.id = id;
  if (id == "riesz-odd") {
    g.eval = [dim](const RVec& e) { return e[0] / std::pow(norm2(e), dim + 1); };
    g.cg = 1.0;
  } else if (id == "weak") {
    g.eval = [dim](const RVec& e) { return std::pow(norm2(e), 1.0 - dim); };
    g.cg = r;
  } else if (id == "critical") {
    g.eval = [dim](const RVec& e) { return std::pow(norm2(e), -static_cast<double>(dim)); };
    g.cg = 1.0;
  } else {
    throw ConfigError("unknown singular integrand: " + id);
  }
  return g;
}

namespace {

// Outermost boundary crossing of the graph region along the ray rho -> rho w.
// The region contains the ball of radius eps / sqrt(1 + q01^2) and lies in
// the eps-ball, which brackets the root.
double boundary_gamma(const GraphFunction& gf, const RVec& w, double eps) {
  auto h = [&](double rho) {
    const double gv = gf.gamma(scale(rho, w));
    return rho * rho + gv * gv - eps * eps;
  };
  const double hi = std::min(gf.r * (1.0 - 1e-12), eps);
  const double lo = 0.5 * eps / std::sqrt(1.0 + gf.q01 * gf.q01);
  if (h(hi) < 0.0) return hi;
  double A = -1.0, B = -1.0, prevR = hi;
  const int m = 64;
  for (int i = m - 1; i >= 0; --i) {
    const double rho = lo + (hi - lo) * i / m;
    if (h(rho) < 0.0) {
      A = rho;
      B = prevR;
      break;
    }
    prevR = rho;
  }
  if (A < 0.0) return lo;
  for (int it = 0; it < 100 && (B - A) > 1e-16 * eps; ++it) {
    const double mid = 0.5 * (A + B);
    (h(mid) < 0.0 ? A : B) = mid;
  }
  return 0.5 * (A + B);
}

// Radial integral of g(rho w) rho^{dim-1} over [lo, hi], geometric cells so
// the singular end is resolved.
double radial_integral(const SingularIntegrand& g, const RVec& w, double lo, double hi,
                       int cells) {
  if (!(hi > lo) || !(lo > 0.0)) return 0.0;
  const GlRule& gl = gauss_rule(4);
  const double ratio = std::pow(hi / lo, 1.0 / cells);
  KSum acc;
  double r0 = lo;
  for (int j = 0; j < cells; ++j) {
    const double r1 = (j + 1 == cells) ? hi : r0 * ratio;
    const double mid = 0.5 * (r0 + r1), half = 0.5 * (r1 - r0);
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const double rho = mid + half * gl.x[q];
      acc.add(g.eval(scale(rho, w)) * std::pow(rho, g.dim - 1) * half * gl.w[q]);
    }
    r0 = r1;
  }
  return acc.total();
}

struct RegionIntegrals {
  double ig = 0.0, ia = 0.0, diff = 0.0;  // diff = integralGamma - integralA
};

RegionIntegrals polar_pass(const GraphFunction& gf, const SingularIntegrand& g, double eps,
                           int nang, int nrad, int gapCells) {
  const auto dirs = directions(gf.dim, nang);
  const double wang = gf.dim == 1 ? 1.0 : 2.0 * kPi / static_cast<double>(dirs.size());
  KSum sg, sa, sd;
  for (const auto& w : dirs) {
    const double aw = dot(gf.a, w);
    const double ra = eps / std::sqrt(1.0 + aw * aw);
    const double rg = boundary_gamma(gf, w, eps);
    sg.add(wang * radial_integral(g, w, rg, gf.r, nrad));
    sa.add(wang * radial_integral(g, w, ra, gf.r, nrad));
    // The difference is one thin radial band per ray; integrating it
    // directly keeps small values fully resolved.
    double d = radial_integral(g, w, std::min(ra, rg), std::max(ra, rg), gapCells);
    if (ra > rg) d = -d;
    sd.add(wang * d);
  }
  RegionIntegrals out;
  out.ig = sg.total();
  out.ia = sa.total();
  out.diff = sd.total();
  return out;
}

}  // namespace

TruncationComparison truncated_difference(const GraphFunction& gf, const SingularIntegrand& g,
                                          double eps, const PolarGridConfig& grid) {
  if (gf.dim != g.dim) throw ConfigError("integrand dimension does not match the graph");
  if (gf.dim > 2) throw ConfigError("the polar reference integrator covers dim 1 and 2");
  if (!(eps > 0.0) || eps >= gf.r) throw ConfigError("truncated difference needs eps in (0, r)");
  TruncationComparison out;
  out.eps = eps;
  out.alphaEps = alpha_modulus(gf, eps);
  out.cg = g.cg;
  const double s = sphere_measure(gf.dim);
  const double a2 = dot(gf.a, gf.a);
  out.boundB = g.cg * s * (std::log1p(out.alphaEps) + 0.5 * std::log1p(a2));
  out.hasBoundC = out.alphaEps < 0.5;
  if (out.hasBoundC)
    out.boundC = g.cg * s * (std::log1p(out.alphaEps) - 0.5 * std::log1p(-2.0 * out.alphaEps));
  double prev = 0.0;
  for (int lev = 0; lev < std::max(1, grid.levels); ++lev) {
    const RegionIntegrals ri =
        polar_pass(gf, g, eps, grid.angular << lev, grid.radial << lev, 64 << lev);
    out.integralGamma = ri.ig;
    out.integralA = ri.ia;
    out.lhs = std::abs(ri.diff);
    if (lev > 0) {
      out.refinementError = std::abs(out.lhs - prev);
      if (out.refinementError <= std::max(1e-12, 1e-8 * out.lhs)) break;
    }
    prev = out.lhs;
  }
  out.okB = out.lhs <= out.boundB + 1e-6;
  out.okC = !out.hasBoundC || out.lhs <= out.boundC + 1e-6;
  return out;
}

PvTrace pv_convergence(const GraphFunction& gf, const SingularIntegrand& g,
                       const std::vector<double>& epsSeq, const PolarGridConfig& grid) {
  if (epsSeq.empty()) throw ConfigError("pv convergence needs a nonempty eps sequence");
  PvTrace tr;
  tr.eps = epsSeq;
  std::sort(tr.eps.rbegin(), tr.eps.rend());
  for (const double e : tr.eps) {
    const TruncationComparison c = truncated_difference(gf, g, e, grid);
    tr.gammaTrace.push_back(c.integralGamma);
    tr.aTrace.push_back(c.integralA);
    tr.diffTrace.push_back(c.lhs);
  }
  const size_t m = tr.eps.size();
  if (m >= 2) {
    const auto settled = [&](const std::vector<double>& t) {
      return std::abs(t[m - 1] - t[m - 2]) <= std::max(1e-8, 1e-5 * std::abs(t[m - 1]));
    };
    tr.gammaCauchy = settled(tr.gammaTrace);
    tr.aCauchy = settled(tr.aTrace);
  }
  tr.limitGamma = tr.gammaTrace.back();
  tr.limitA = tr.aTrace.back();
  return tr;
}

}  // namespace layerpot
