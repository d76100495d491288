#include "layerpot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace layerpot {

// ---- Gauss-Legendre nodes on [-1, 1] -----------------------------------

const GlRule& gauss_rule(int m) {
  static std::map<int, GlRule> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GlRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= m; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = m * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(m, std::move(r)).first->second;
}

namespace {

// Neumaier compensated accumulator; the quadrature reduction runs in a fixed
// order (patch, ray, piece, node), so results do not depend on thread count.
struct Acc {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double total() const { return s + c; }
};

struct CAcc {
  Acc re, im;
  void add(Cplx v) {
    re.add(v.real());
    im.add(v.imag());
  }
  Cplx total() const { return {re.total(), im.total()}; }
};

double bump_chi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

RVec chart_point(const GraphPatch& P, const RVec& eta) {
  const int n = P.R.n;
  RVec local(n);
  for (int i = 0; i < n - 1; ++i) local[i] = eta[i];
  local[n - 1] = P.gamma(eta);
  RVec x = mat_t_vec(P.R, local);
  for (int i = 0; i < n; ++i) x[i] += P.p[i];
  return x;
}

double profile_bump(double v, double tc, double p) {
  const double t = v - tc;
  return t > 0.0 ? std::pow(t, p) : 0.0;
}

double profile_bump_d(double v, double tc, double p) {
  const double t = v - tc;
  return t > 0.0 ? p * std::pow(t, p - 1.0) : 0.0;
}

constexpr double kBumpTc = 0.65;
constexpr double kValidCap = 0.9;  // cap on q^2 = sum (eta_i/A_i)^2 inside a chart

}  // namespace

double BoundarySurface::weight(int pi, const RVec& y) const {
  const RVec u = unit_dir(y);
  double wsum = 0.0, wp = 0.0;
  const double t0 = pu_threshold;
  for (size_t q = 0; q < patches.size(); ++q) {
    const GraphPatch& P = patches[q];
    const double w = bump_chi((P.sign * u[P.axis] - t0) / (1.0 - t0));
    wsum += w;
    if (static_cast<int>(q) == pi) wp = w;
  }
  return wp / wsum;
}

RVec BoundarySurface::outward_normal(const RVec& y) const {
  RVec g = level_grad(y);
  const double m = norm2(g);
  for (double& v : g) v /= m;
  return g;
}

SurfacePoint BoundarySurface::at(int pi, const RVec& eta) const {
  const GraphPatch& P = patches[pi];
  SurfacePoint sp;
  sp.patch = pi;
  sp.eta = eta;
  sp.x = chart_point(P, eta);
  const RVec dg = P.dgamma(eta);
  const double m2 = 1.0 + dot(dg, dg);
  sp.metric = std::sqrt(m2);
  RVec local(n);
  for (int i = 0; i < n - 1; ++i) local[i] = -dg[i] / sp.metric;
  local[n - 1] = 1.0 / sp.metric;
  sp.normal = mat_t_vec(P.R, local);
  return sp;
}

SurfacePoint BoundarySurface::from_ambient(const RVec& xin) const {
  const RVec u = unit_dir(xin);
  const RVec y = from_direction(u);
  int best = 0;
  double wbest = -1.0;
  for (size_t q = 0; q < patches.size(); ++q) {
    const double w = weight(static_cast<int>(q), y);
    if (w > wbest) {
      wbest = w;
      best = static_cast<int>(q);
    }
  }
  const GraphPatch& P = patches[best];
  RVec rel(n);
  for (int i = 0; i < n; ++i) rel[i] = y[i] - P.p[i];
  const RVec local = mat_vec(P.R, rel);
  RVec eta(n - 1);
  for (int i = 0; i < n - 1; ++i) eta[i] = local[i];
  return at(best, eta);
}

std::vector<SurfacePoint> BoundarySurface::quasi_uniform_points(int count,
                                                                bool with_patch_bases) const {
  std::vector<SurfacePoint> pts;
  pts.reserve(count + (with_patch_bases ? patches.size() : 0));
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double phi = 2.0 * kPi * (i + 0.5) / count;
      pts.push_back(from_ambient(from_direction({std::cos(phi), std::sin(phi)})));
    }
  } else {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      pts.push_back(from_ambient(from_direction({rho * std::cos(phi), rho * std::sin(phi), z})));
    }
  }
  if (with_patch_bases)
    for (size_t q = 0; q < patches.size(); ++q)
      pts.push_back(at(static_cast<int>(q), RVec(n - 1, 0.0)));
  return pts;
}

namespace {

// Patches of the ellipsoid family x_1^2/A_1^2 + ... = 1 (covers circle,
// sphere, ellipse, ellipsoid).  gamma has a closed form; q^2 is clamped just
// past the valid cap so nodes with zero weight still evaluate.
GraphPatch ellipsoid_patch(const RVec& A, int axis, int sign) {
  const int n = static_cast<int>(A.size());
  GraphPatch P;
  P.axis = axis;
  P.sign = sign;
  P.p = RVec(n, 0.0);
  P.p[axis] = sign * A[axis];
  P.R = RMat(n);
  RVec Ap(n - 1);
  {
    int row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == axis) continue;
      P.R(row, j) = 1.0;
      Ap[row] = A[j];
      ++row;
    }
    P.R(n - 1, axis) = sign;
  }
  double amax = 0.0;
  for (double v : Ap) amax = std::max(amax, v);
  P.radius = std::sqrt(kValidCap) * amax;
  P.polar_scale = Ap;  // fan coordinates make q circular, so the PU edge is a ring
  P.radius_zeta = std::sqrt(0.93);
  const double Ad = A[axis];
  P.delta = 2.2 * Ad * (1.0 - std::sqrt(1.0 - kValidCap));
  auto q2_of = [Ap](const RVec& eta) {
    double q2 = 0.0;
    for (size_t i = 0; i < eta.size(); ++i) q2 += (eta[i] / Ap[i]) * (eta[i] / Ap[i]);
    return q2;
  };
  P.gamma = [Ad, q2_of](const RVec& eta) {
    const double q2 = std::min(q2_of(eta), 0.97);
    return Ad * (std::sqrt(1.0 - q2) - 1.0);
  };
  P.dgamma = [Ad, Ap, q2_of](const RVec& eta) {
    const double q2 = std::min(q2_of(eta), 0.97);
    const double root = std::sqrt(1.0 - q2);
    RVec g(eta.size());
    for (size_t i = 0; i < eta.size(); ++i) g[i] = -Ad * eta[i] / (Ap[i] * Ap[i] * root);
    return g;
  };
  P.d2gamma = [Ad, Ap, q2_of](const RVec& eta) {
    const double q2 = std::min(q2_of(eta), 0.97);
    const double root = std::sqrt(1.0 - q2);
    const int m = static_cast<int>(eta.size());
    RMat H(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double vi = eta[i] / (Ap[i] * Ap[i]);
        const double vj = eta[j] / (Ap[j] * Ap[j]);
        H(i, j) = -Ad * ((i == j ? 1.0 / (Ap[i] * Ap[i]) : 0.0) / root + vi * vj / (root * root * root));
      }
    return H;
  };
  P.valid = [q2_of](const RVec& eta) { return q2_of(eta) <= kValidCap; };
  return P;
}

struct BumpShape {
  double R, amp, expo;
  RVec omega;  // unit bump direction

  double rho(const RVec& u) const { return R + amp * profile_bump(dot(u, omega), kBumpTc, expo); }

  double level(const RVec& y) const {
    const double r = norm2(y);
    RVec u = scale(1.0 / r, y);
    return r - rho(u);
  }

  RVec level_grad(const RVec& y) const {
    const double r = norm2(y);
    const RVec u = scale(1.0 / r, y);
    const double v = dot(u, omega);
    const double bp = amp * profile_bump_d(v, kBumpTc, expo);
    RVec g = u;
    for (size_t i = 0; i < g.size(); ++i) g[i] -= bp * (omega[i] - v * u[i]) / r;
    return g;
  }
};

// Height solve for implicit charts: find t with F(base + R^t(eta, t)) = 0.
double implicit_height(const std::function<double(const RVec&)>& F,
                       const std::function<RVec(const RVec&)>& gradF, const RVec& p,
                       const RMat& Rf, const RVec& eta, double t0, double scale) {
  const int n = Rf.n;
  RVec wt(n);
  for (int i = 0; i < n; ++i) wt[i] = Rf(n - 1, i);
  auto point = [&](double t) {
    RVec local(n);
    for (int i = 0; i < n - 1; ++i) local[i] = eta[i];
    local[n - 1] = t;
    RVec y = mat_t_vec(Rf, local);
    for (int i = 0; i < n; ++i) y[i] += p[i];
    return y;
  };
  double t = t0;
  for (int iter = 0; iter < 60; ++iter) {
    const RVec y = point(t);
    const double f = F(y);
    if (std::abs(f) < 1e-14 * scale) return t;
    const double df = dot(gradF(y), wt);
    if (std::abs(df) < 1e-10) break;
    double step = f / df;
    if (std::abs(step) > 0.5 * scale) step = (step > 0 ? 0.5 : -0.5) * scale;
    t -= step;
  }
  // Bisection fallback on an expanding bracket.
  double lo = t0 - 0.05 * scale, hi = t0 + 0.05 * scale;
  double flo = F(point(lo)), fhi = F(point(hi));
  for (int grow = 0; grow < 40 && flo * fhi > 0.0; ++grow) {
    lo -= 0.05 * scale;
    hi += 0.05 * scale;
    flo = F(point(lo));
    fhi = F(point(hi));
  }
  if (flo * fhi > 0.0) throw ConvergenceError("implicit chart: no height bracket");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(point(mid));
    if (fm == 0.0 || hi - lo < 1e-15 * scale) return mid;
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

RVec implicit_dgamma(const std::function<RVec(const RVec&)>& gradF, const RVec& p, const RMat& Rf,
                     const RVec& eta, double t) {
  const int n = Rf.n;
  RVec local(n);
  for (int i = 0; i < n - 1; ++i) local[i] = eta[i];
  local[n - 1] = t;
  RVec y = mat_t_vec(Rf, local);
  for (int i = 0; i < n; ++i) y[i] += p[i];
  const RVec g = gradF(y);
  const RVec glocal = mat_vec(Rf, g);  // gradient in chart coordinates
  RVec out(n - 1);
  for (int i = 0; i < n - 1; ++i) out[i] = -glocal[i] / glocal[n - 1];
  return out;
}

GraphPatch bump_patch(const BumpShape& B, int axis, int sign) {
  const int n = 3;
  GraphPatch P;
  P.axis = axis;
  P.sign = sign;
  P.p = RVec(n, 0.0);
  P.p[axis] = sign * B.R;  // the bump support excludes the axis points
  P.R = RMat(n);
  {
    int row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == axis) continue;
      P.R(row, j) = 1.0;
      ++row;
    }
    P.R(n - 1, axis) = sign;
  }
  P.radius = 0.96 * B.R;
  P.polar_scale = RVec(2, 1.0);
  P.radius_zeta = 0.955 * B.R;
  const double valid_r = 0.945 * B.R;
  P.delta = 2.2 * 0.75 * B.R;
  auto F = [B](const RVec& y) { return B.level(y); };
  auto gF = [B](const RVec& y) { return B.level_grad(y); };
  const RVec p = P.p;
  const RMat Rf = P.R;
  const double R0 = B.R;
  auto height = [F, gF, p, Rf, R0](const RVec& eta) {
    const double e2 = dot(eta, eta);
    const double t0 = std::sqrt(std::max(R0 * R0 - std::min(e2, 0.92 * R0 * R0), 1e-12)) - R0;
    return implicit_height(F, gF, p, Rf, eta, t0, R0);
  };
  P.gamma = height;
  P.dgamma = [gF, p, Rf, height](const RVec& eta) {
    return implicit_dgamma(gF, p, Rf, eta, height(eta));
  };
  P.d2gamma = [P, R0](const RVec& eta) {
    const double h = 1e-6 * R0;
    const int m = static_cast<int>(eta.size());
    RMat H(m);
    for (int j = 0; j < m; ++j) {
      RVec ep(eta), em(eta);
      ep[j] += h;
      em[j] -= h;
      const RVec gp = P.dgamma(ep);
      const RVec gm = P.dgamma(em);
      for (int i = 0; i < m; ++i) H(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
    return H;
  };
  P.valid = [valid_r](const RVec& eta) { return norm2(eta) <= valid_r; };
  return P;
}

void estimate_patch_bounds(BoundarySurface& S) {
  double c11 = 0.0;
  for (GraphPatch& P : S.patches) {
    double worst = 0.0;
    const int ndir = (S.n == 2) ? 2 : 12;
    for (int ir = 1; ir <= 5; ++ir)
      for (int id = 0; id < ndir; ++id) {
        RVec eta(S.n - 1, 0.0);
        const double r = 0.19 * ir * P.radius;
        if (S.n == 2) {
          eta[0] = (id == 0 ? r : -r);
        } else {
          const double phi = 2.0 * kPi * (id + 0.31) / ndir;
          eta[0] = r * std::cos(phi);
          eta[1] = r * std::sin(phi);
        }
        if (!P.valid(eta)) continue;
        const double g = std::abs(P.gamma(eta));
        const double dg = norm2(P.dgamma(eta));
        const RMat H = P.d2gamma(eta);
        double hnorm = 0.0;
        for (double v : H.a) hnorm += v * v;
        hnorm = std::sqrt(hnorm);
        worst = std::max({worst, hnorm, dg / norm2(eta), 2.0 * g / dot(eta, eta)});
      }
    P.lipDGrad = worst;
    c11 = std::max(c11, worst);
  }
  S.c11Bound = c11;
}

double search_uniform_radius(const BoundarySurface& S, double scale) {
  const std::vector<double> factors = {0.75, 0.6, 0.5, 0.4, 0.3, 0.2};
  const auto probes = S.quasi_uniform_points(S.n == 2 ? 24 : 40, true);
  for (double f : factors) {
    const double r = f * scale;
    bool ok = true;
    for (const auto& sp : probes) {
      try {
        const GraphPatch C = local_chart(S, sp.x, r);
        for (int id = 0; id < 2 * (S.n - 1) && ok; ++id)
          for (double frac : {0.45, 0.9}) {
            RVec eta(S.n - 1, 0.0);
            const double phi = kPi * (2.0 * id + 0.7) / (2.0 * (S.n - 1));
            if (S.n == 2)
              eta[0] = (id == 0 ? 1.0 : -1.0) * frac * r;
            else {
              eta[0] = frac * r * std::cos(phi);
              eta[1] = frac * r * std::sin(phi);
            }
            const double g = C.gamma(eta);
            const RVec dg = C.dgamma(eta);
            if (std::abs(g) > 0.75 * r || norm2(dg) > 2.5) {
              ok = false;
              break;
            }
          }
      } catch (const ConvergenceError&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (ok) return r;
  }
  return 0.1 * scale;
}

}  // namespace

BoundarySurface make_surface(const ShapeSpec& spec, const QuadratureConfig& quad) {
  BoundarySurface S;
  S.shape = spec;
  S.quad = quad;
  S.pu_threshold = 0.4;

  auto make_ellipsoid_family = [&](const RVec& A) {
    const int n = static_cast<int>(A.size());
    S.n = n;
    for (double v : A)
      if (!(v > 0.0)) throw ConfigError("surface axes must be positive");
    S.level = [A](const RVec& y) {
      double s = -1.0;
      for (size_t j = 0; j < A.size(); ++j) s += (y[j] / A[j]) * (y[j] / A[j]);
      return s;
    };
    S.level_grad = [A](const RVec& y) {
      RVec g(y.size());
      for (size_t j = 0; j < A.size(); ++j) g[j] = 2.0 * y[j] / (A[j] * A[j]);
      return g;
    };
    S.unit_dir = [A](const RVec& y) {
      RVec u(y.size());
      double m = 0.0;
      for (size_t j = 0; j < A.size(); ++j) {
        u[j] = y[j] / A[j];
        m += u[j] * u[j];
      }
      m = std::sqrt(m);
      for (double& v : u) v /= m;
      return u;
    };
    S.from_direction = [A](const RVec& u) {
      RVec y(u.size());
      for (size_t j = 0; j < A.size(); ++j) y[j] = A[j] * u[j];
      return y;
    };
    double amax = 0.0;
    for (double v : A) amax = std::max(amax, v);
    S.diameter = 2.0 * amax;
    for (int d = 0; d < n; ++d)
      for (int s : {1, -1}) S.patches.push_back(ellipsoid_patch(A, d, s));
  };

  if (spec.kind == "circle") {
    if (!(spec.R > 0.0)) throw ConfigError("circle: R must be positive");
    make_ellipsoid_family({spec.R, spec.R});
    S.id = "circle(" + std::to_string(spec.R) + ")";
  } else if (spec.kind == "sphere") {
    if (!(spec.R > 0.0)) throw ConfigError("sphere: R must be positive");
    make_ellipsoid_family({spec.R, spec.R, spec.R});
    S.id = "sphere(" + std::to_string(spec.R) + ")";
  } else if (spec.kind == "ellipse") {
    make_ellipsoid_family({spec.a, spec.b});
    S.id = "ellipse(" + std::to_string(spec.a) + "," + std::to_string(spec.b) + ")";
  } else if (spec.kind == "ellipsoid") {
    make_ellipsoid_family({spec.a, spec.b, spec.c});
    S.id = "ellipsoid";
  } else if (spec.kind == "bump_sphere") {
    if (!(spec.R > 0.0) || spec.amplitude < 0.0)
      throw ConfigError("bump_sphere: R must be positive and amplitude nonnegative");
    if (!(spec.exponent >= 1.2 && spec.exponent <= 4.0))
      throw ConfigError("bump_sphere: exponent must lie in [1.2, 4]");
    S.n = 3;
    BumpShape B;
    B.R = spec.R;
    B.amp = spec.amplitude;
    B.expo = spec.exponent;
    B.omega = scale(1.0 / std::sqrt(3.0), RVec{1.0, 1.0, 1.0});
    const double rho_max = B.R + B.amp * profile_bump(1.0, kBumpTc, B.expo);
    // Raise the PU threshold until every weight support fits inside its chart.
    double t0 = 0.4;
    const double need = 1.0 - std::pow(0.93 * B.R / rho_max, 2);
    if (need > t0 * t0) t0 = std::sqrt(need);
    if (t0 > 1.0 / std::sqrt(3.0) - 0.04)
      throw ConfigError("bump_sphere: amplitude too large for the axis-aligned atlas");
    S.pu_threshold = t0;
    S.level = [B](const RVec& y) { return B.level(y); };
    S.level_grad = [B](const RVec& y) { return B.level_grad(y); };
    S.unit_dir = [](const RVec& y) {
      const double m = norm2(y);
      return scale(1.0 / m, y);
    };
    S.from_direction = [B](const RVec& u) { return scale(B.rho(u), u); };
    double diam = 2.0 * B.R;
    for (int i = 0; i < 400; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / 400.0;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kPi * (3.0 - std::sqrt(5.0)) * i;
      const RVec u = {rr * std::cos(phi), rr * std::sin(phi), z};
      diam = std::max(diam, B.rho(u) + B.rho(scale(-1.0, u)));
    }
    S.diameter = diam;
    for (int d = 0; d < 3; ++d)
      for (int s : {1, -1}) S.patches.push_back(bump_patch(B, d, s));
    S.id = "bump_sphere";
  } else {
    throw ConfigError("unknown shape kind: " + spec.kind);
  }

  estimate_patch_bounds(S);
  double min_axis = S.patches.front().radius;
  for (const auto& P : S.patches) min_axis = std::min(min_axis, P.radius);
  S.rBoundary = search_uniform_radius(S, min_axis);
  return S;
}

GraphPatch local_chart(const BoundarySurface& S, const RVec& x0, double radius) {
  const int n = S.n;
  GraphPatch P;
  P.p = x0;
  P.radius = radius;
  P.delta = 2.0 * radius;
  const RVec nu = S.outward_normal(x0);
  P.R = RMat(n);
  // Tangent rows: coordinate axes orthonormalized against nu (and each other),
  // skipping the axis most aligned with nu.
  int skip = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(nu[i]) > std::abs(nu[skip])) skip = i;
  std::vector<RVec> rows;
  for (int i = 0; i < n && static_cast<int>(rows.size()) < n - 1; ++i) {
    if (i == skip) continue;
    RVec v(n, 0.0);
    v[i] = 1.0;
    v = axpy(-dot(v, nu), nu, v);
    for (const RVec& r : rows) v = axpy(-dot(v, r), r, v);
    const double m = norm2(v);
    if (m < 1e-12) continue;
    rows.push_back(scale(1.0 / m, v));
  }
  if (static_cast<int>(rows.size()) != n - 1) throw ConvergenceError("local_chart: degenerate frame");
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n; ++j) P.R(i, j) = rows[i][j];
  for (int j = 0; j < n; ++j) P.R(n - 1, j) = nu[j];

  auto F = S.level;
  auto gF = S.level_grad;
  const RVec p = P.p;
  const RMat Rf = P.R;
  const double scale0 = std::max(radius, 0.05 * S.diameter);
  auto height = [F, gF, p, Rf, scale0](const RVec& eta) {
    return implicit_height(F, gF, p, Rf, eta, 0.0, scale0);
  };
  P.gamma = height;
  P.dgamma = [gF, p, Rf, height](const RVec& eta) {
    return implicit_dgamma(gF, p, Rf, eta, height(eta));
  };
  P.d2gamma = [P, radius](const RVec& eta) {
    const double h = 1e-6 * std::max(radius, 1.0);
    const int m = static_cast<int>(eta.size());
    RMat H(m);
    for (int j = 0; j < m; ++j) {
      RVec ep(eta), em(eta);
      ep[j] += h;
      em[j] -= h;
      const RVec gp = P.dgamma(ep);
      const RVec gm = P.dgamma(em);
      for (int i = 0; i < m; ++i) H(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
    return H;
  };
  P.polar_scale = RVec(n - 1, 1.0);
  P.radius_zeta = radius;
  P.valid = [radius](const RVec& eta) { return norm2(eta) <= radius; };
  return P;
}

// ---- polar quadrature ---------------------------------------------------

namespace {

struct RayContext {
  const BoundarySurface* S;
  int patch;
  RVec center;  // polar center in stretched (zeta) coordinates
  RVec dir;     // unit ray direction in zeta
  const SurfacePoint* x;

  RVec eta_at(double s) const {
    const RVec& ps = S->patches[patch].polar_scale;
    RVec e(center);
    for (size_t i = 0; i < e.size(); ++i) e[i] = ps[i] * (center[i] + s * dir[i]);
    return e;
  }
  double dist_at(double s) const {
    const RVec y = chart_point(S->patches[patch], eta_at(s));
    return norm2(sub(y, x->x));
  }
};

double bisect_crossing(const RayContext& rc, double a, double b, double da, double db, double rho,
                       double tol) {
  (void)da;
  (void)db;
  double lo = a, hi = b;
  double flo = rc.dist_at(lo) - rho;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < tol) return mid;
    const double fm = rc.dist_at(mid) - rho;
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FamilyResult truncated_family(const BoundarySurface& S, const SurfacePoint& x,
                              std::vector<double> radii, int ncomp, const Integrand& f,
                              int level) {
  if (radii.empty()) throw ConfigError("truncated_family: empty radius grid");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.front() < 0.0) throw ConfigError("truncated_family: negative truncation radius");

  const int R = static_cast<int>(radii.size());
  const int nphi = (S.n == 2) ? 2 : (S.quad.angular_base << level);
  const int nseg = S.quad.radial_segments << level;
  const double ratio = std::pow(0.55, 1.0 / (1 << level));
  const GlRule& gl = gauss_rule(S.quad.gauss_order);

  std::vector<std::vector<CAcc>> bins(R + 1, std::vector<CAcc>(ncomp));
  std::vector<Cplx> fbuf(ncomp);

  for (size_t pi = 0; pi < S.patches.size(); ++pi) {
    const GraphPatch& P = S.patches[pi];
    // Polar center: frame projection of x, clamped into the fan disc.  Rays
    // are centered there only when x is close to this patch (that is where a
    // singular integrand needs the polar concentration); otherwise a centered
    // fan resolves the weight transition best.
    double ps_max = 0.0, ps_prod = 1.0;
    for (double v : P.polar_scale) {
      ps_max = std::max(ps_max, v);
      ps_prod *= v;
    }
    RVec rel(S.n);
    for (int i = 0; i < S.n; ++i) rel[i] = x.x[i] - P.p[i];
    const RVec local = mat_vec(P.R, rel);
    RVec c(S.n - 1);
    for (int i = 0; i < S.n - 1; ++i) c[i] = local[i] / P.polar_scale[i];
    const double cn = norm2(c);
    if (cn > 0.985 * P.radius_zeta) c = scale(0.985 * P.radius_zeta / cn, c);
    RVec c_eta(S.n - 1);
    for (int i = 0; i < S.n - 1; ++i) c_eta[i] = c[i] * P.polar_scale[i];
    // On-surface centers project exactly (d0 = 0) into every chart that
    // reaches them; d0 > 0 means x is off this patch, and only nearby
    // off-surface evaluation points still need the off-center fan.
    const double d0 = norm2(sub(chart_point(P, c_eta), x.x));
    const bool singular_here = d0 < 1e-9 * (1.0 + S.diameter);
    if (!singular_here && d0 >= 0.18 * ps_max * P.radius_zeta) c.assign(S.n - 1, 0.0);

    for (int iphi = 0; iphi < nphi; ++iphi) {
      RayContext rc{&S, static_cast<int>(pi), c, {}, &x};
      double angw = 1.0;
      if (S.n == 2) {
        rc.dir = {iphi == 0 ? 1.0 : -1.0};
      } else {
        const double phi = 2.0 * kPi * (iphi + 0.5) / nphi;
        rc.dir = {std::cos(phi), std::sin(phi)};
        angw = 2.0 * kPi / nphi;
      }
      // Ray exit from the fan disc.
      const double cu = dot(rc.center, rc.dir);
      const double disc = cu * cu + P.radius_zeta * P.radius_zeta - dot(rc.center, rc.center);
      if (disc <= 0.0) continue;
      const double s_edge = -cu + std::sqrt(disc);
      if (s_edge <= 1e-14) continue;

      // Radial skeleton: geometric toward the center with a segment-length cap.
      double floor_s = 0.0;
      if (singular_here) {
        if (radii.front() > 0.0) {
          // Points below the floor must stay inside the smallest ball.
          floor_s = 0.25 * radii.front() / std::max(1.0, ps_max);
          while (floor_s > 1e-12 && rc.dist_at(floor_s) > 0.6 * radii.front()) floor_s *= 0.5;
        } else {
          floor_s = S.quad.singular_floor * s_edge;
        }
      }
      const double lmax = s_edge / nseg;
      const double stop = singular_here ? floor_s : 0.3 * lmax;
      std::vector<double> bp;
      bp.push_back(s_edge);
      double scur = s_edge;
      while (scur > stop * (1.0 + 1e-12) && scur > 0.0) {
        const double snext = std::max(scur * ratio, stop);
        const double len = scur - snext;
        if (len > lmax) {
          const int parts = static_cast<int>(std::ceil(len / lmax));
          for (int q = 1; q < parts; ++q) bp.push_back(scur - len * q / parts);
        }
        bp.push_back(snext);
        scur = snext;
      }
      if (!singular_here) bp.push_back(0.0);
      std::sort(bp.begin(), bp.end());

      // Scan grid (breakpoints plus midpoints) for truncation crossings.
      std::vector<double> sg, dg;
      for (size_t i = 0; i + 1 < bp.size(); ++i) {
        sg.push_back(bp[i]);
        sg.push_back(0.5 * (bp[i] + bp[i + 1]));
      }
      sg.push_back(bp.back());
      dg.resize(sg.size());
      for (size_t i = 0; i < sg.size(); ++i) dg[i] = rc.dist_at(sg[i]);

      std::vector<double> cuts = bp;
      const double tol = 1e-13 * std::max(1.0, s_edge);
      for (double rho : radii) {
        if (rho <= 0.0) continue;
        for (size_t i = 0; i + 1 < sg.size(); ++i) {
          const double fa = dg[i] - rho, fb = dg[i + 1] - rho;
          if (fa == 0.0) cuts.push_back(sg[i]);
          if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
            cuts.push_back(bisect_crossing(rc, sg[i], sg[i + 1], fa, fb, rho, tol));
        }
      }
      std::sort(cuts.begin(), cuts.end());

      for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-14 * std::max(1.0, s_edge)) continue;
        const double smid = 0.5 * (a + b);
        const RVec emid = rc.eta_at(smid);
        const RVec ea = rc.eta_at(a), eb = rc.eta_at(b);
        if (!P.valid(ea) && !P.valid(emid) && !P.valid(eb)) continue;
        const double dmid = rc.dist_at(smid);
        int bin = 0;
        while (bin < R && radii[bin] <= dmid) ++bin;
        if (bin == 0) continue;  // inside every truncation ball
        for (int q = 0; q < S.quad.gauss_order; ++q) {
          const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[q];
          const double wq = 0.5 * (b - a) * gl.w[q];
          const RVec eta = rc.eta_at(s);
          if (!P.valid(eta)) continue;
          const SurfacePoint sp = S.at(static_cast<int>(pi), eta);
          const double w = S.weight(static_cast<int>(pi), sp.x);
          if (w <= 0.0) continue;
          const double jac = wq * angw * ps_prod * std::pow(s, S.n - 2) * sp.metric * w;
          f(sp, std::span<Cplx>(fbuf.data(), ncomp));
          for (int cc = 0; cc < ncomp; ++cc) bins[bin][cc].add(jac * fbuf[cc]);
        }
      }
    }
  }

  FamilyResult out;
  out.radii = radii;
  out.far.assign(ncomp, 0.0);
  for (int cc = 0; cc < ncomp; ++cc) out.far[cc] = bins[R][cc].total();
  out.annuli.assign(R - 1 > 0 ? R - 1 : 0, CVec(ncomp, 0.0));
  for (int j = 0; j + 1 < R; ++j)
    for (int cc = 0; cc < ncomp; ++cc) out.annuli[j][cc] = bins[j + 1][cc].total();
  out.truncated.assign(R, CVec(ncomp, 0.0));
  CVec run = out.far;
  out.truncated[R - 1] = run;
  for (int j = R - 2; j >= 0; --j) {
    for (int cc = 0; cc < ncomp; ++cc) run[cc] += out.annuli[j][cc];
    out.truncated[j] = run;
  }
  return out;
}

CVec integrate_truncated(const BoundarySurface& S, const SurfacePoint& x, double rho, int ncomp,
                         const Integrand& f, int level) {
  return truncated_family(S, x, {rho}, ncomp, f, level).truncated[0];
}

Cplx integrate_truncated(const BoundarySurface& S, const SurfacePoint& x, double rho,
                         const std::function<Cplx(const SurfacePoint&)>& f, int level) {
  Integrand wrap = [&f](const SurfacePoint& y, std::span<Cplx> out) { out[0] = f(y); };
  return integrate_truncated(S, x, rho, 1, wrap, level)[0];
}

Cplx integrate(const BoundarySurface& S, const std::function<Cplx(const SurfacePoint&)>& f,
               int level) {
  // Reference point far off the surface: every chart then runs a centered
  // fan with no singular floor, so no hole is cut around an on-surface
  // center (the floor would bias smooth full-surface integrals).
  SurfacePoint far;
  far.patch = 0;
  far.eta = RVec(S.n - 1, 0.0);
  far.x = RVec(S.n, 0.0);
  far.x[0] = 10.0 * std::max(S.diameter, 1.0);
  far.normal = RVec(S.n, 0.0);
  far.metric = 1.0;
  return integrate_truncated(S, far, 0.0, f, level);
}

double measure(const BoundarySurface& S, int level) {
  return integrate(S, [](const SurfacePoint&) { return Cplx(1.0); }, level).real();
}

CVec tangential_project(const RVec& normal, const CVec& v) {
  Cplx nv = 0.0;
  for (size_t i = 0; i < v.size(); ++i) nv += normal[i] * v[i];
  CVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - nv * normal[i];
  return out;
}

RVec tangential_project(const RVec& normal, const RVec& v) {
  const double nv = dot(normal, v);
  return axpy(-nv, normal, v);
}

CVec surface_fd_gradient(const BoundarySurface& S, const SurfacePoint& sp,
                         const std::function<Cplx(const SurfacePoint&)>& g, double h) {
  const int m = S.n - 1;
  const GraphPatch& P = S.patches[sp.patch];
  CVec deta(m);
  for (int i = 0; i < m; ++i) {
    RVec ep(sp.eta), em(sp.eta);
    ep[i] += h;
    em[i] -= h;
    deta[i] = (g(S.at(sp.patch, ep)) - g(S.at(sp.patch, em))) / (2.0 * h);
  }
  // Push forward: grad = Dpsi G^{-1} deta, G = I + dgamma dgamma^t.
  const RVec dgm = P.dgamma(sp.eta);
  CVec a(m);
  if (m == 1) {
    a[0] = deta[0] / (1.0 + dgm[0] * dgm[0]);
  } else {
    const double g11 = 1.0 + dgm[0] * dgm[0];
    const double g22 = 1.0 + dgm[1] * dgm[1];
    const double g12 = dgm[0] * dgm[1];
    const double det = g11 * g22 - g12 * g12;
    a[0] = (g22 * deta[0] - g12 * deta[1]) / det;
    a[1] = (g11 * deta[1] - g12 * deta[0]) / det;
  }
  CVec out(S.n, Cplx(0.0));
  for (int i = 0; i < m; ++i) {
    RVec local(S.n, 0.0);
    local[i] = 1.0;
    local[S.n - 1] = dgm[i];
    const RVec col = mat_t_vec(P.R, local);
    for (int jj = 0; jj < S.n; ++jj) out[jj] += a[i] * col[jj];
  }
  return tangential_project(sp.normal, out);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ConfigError("geometric_grid: bad parameters");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
  return g;
}

}  // namespace layerpot
