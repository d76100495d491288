#include "layerpot/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "layerpot/rng.hpp"

namespace layerpot {

namespace {

RVec unit_dir_sample(int n, int i, int count) {
  if (n == 2) {
    const double phi = 2.0 * kPi * (i + 0.5) / count;
    return {std::cos(phi), std::sin(phi)};
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * i + 1.0) / count;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * i;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

RVec any_tangent(const RVec& p, double angle) {
  const int n = static_cast<int>(p.size());
  int least = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(p[i]) < std::abs(p[least])) least = i;
  RVec t1(n, 0.0);
  t1[least] = 1.0;
  t1 = axpy(-dot(t1, p), p, t1);
  t1 = scale(1.0 / norm2(t1), t1);
  if (n == 2) return t1;
  RVec t2 = {p[1] * t1[2] - p[2] * t1[1], p[2] * t1[0] - p[0] * t1[2],
             p[0] * t1[1] - p[1] * t1[0]};
  RVec t(n);
  for (int i = 0; i < n; ++i) t[i] = std::cos(angle) * t1[i] + std::sin(angle) * t2[i];
  return t;
}

std::pair<double, double> norm_pass(const HomogeneousKernel& k, int count) {
  double sup = 0.0, lip = 0.0;
  for (int i = 0; i < count; ++i) {
    const RVec p = unit_dir_sample(k.n, i, count);
    sup = std::max(sup, std::abs(k.eval(p)));
    // Difference quotients at separations spanning [1e-3, 0.2].
    const double delta = 1e-3 * std::pow(200.0, double(i % 16) / 15.0);
    const RVec t = any_tangent(p, 2.399963 * i);
    RVec q = axpy(delta, t, p);
    q = scale(1.0 / norm2(q), q);
    const double sep = norm2(sub(p, q));
    if (sep > 1e-12) lip = std::max(lip, std::abs(k.eval(p) - k.eval(q)) / sep);
  }
  return {sup, lip};
}

}  // namespace

std::pair<double, double> kernel_norm(const HomogeneousKernel& k, int sampleCount) {
  if (!k.eval) throw ConfigError("kernel_norm: kernel has no evaluator");
  int count = std::max(sampleCount, 64);
  auto cur = norm_pass(k, count);
  for (int round = 0; round < 8; ++round) {
    count *= 2;
    const auto next = norm_pass(k, count);
    const double ds = std::abs(next.first - cur.first) / std::max(next.first, 1e-30);
    const double dl = std::abs(next.second - cur.second) / std::max(next.second, 1e-30);
    cur = next;
    if ((next.first < 1e-30 || ds < 0.01) && (next.second < 1e-30 || dl < 0.01)) break;
  }
  return cur;
}

HomogeneousKernel make_riesz_kernel(int n, int h) {
  if (h < 0 || h >= n) throw ConfigError("riesz kernel: component out of range");
  HomogeneousKernel k;
  k.n = n;
  k.id = "riesz" + std::to_string(h + 1);
  k.eval = [n, h](const RVec& xi) {
    const double r = norm2(xi);
    return Cplx(xi[h] / std::pow(r, n));
  };
  k.supNorm = 1.0;
  k.lipConst = 1.0;  // tangential slope of xi_h on the unit sphere
  k.isOdd = true;
  return k;
}

HomogeneousKernel make_even_control_kernel(int n) {
  HomogeneousKernel k;
  k.n = n;
  k.id = "even";
  k.eval = [n](const RVec& xi) { return Cplx(std::pow(norm2(xi), -(n - 1.0))); };
  k.supNorm = 1.0;
  k.lipConst = 0.0;
  k.isOdd = false;
  return k;
}

HomogeneousKernel make_zero_kernel(int n) {
  HomogeneousKernel k;
  k.n = n;
  k.id = "zero";
  k.eval = [](const RVec&) { return Cplx(0.0); };
  k.isOdd = true;
  return k;
}

CialdeaCheck cialdea_bound_check(const HomogeneousKernel& k, const RVec& u, const RVec& v) {
  const double nu = norm2(u), nv = norm2(v);
  if (nu == 0.0 || nv == 0.0) throw ConfigError("cialdea_bound_check: zero argument");
  CialdeaCheck c;
  c.lhs = std::abs(k.eval(u) - k.eval(v));
  c.rhs = 2.0 * k.n * k.norm() * norm2(sub(u, v)) * std::pow(std::min(nu, nv), -double(k.n));
  c.ok = c.lhs <= c.rhs * (1.0 + 1e-9);
  return c;
}

DoubleLayerKernel make_dl_kernel(FundamentalSolution fs, const BoundarySurface& S) {
  if (fs.n() != S.n) throw ConfigError("double layer kernel: operator/surface dimension mismatch");
  DoubleLayerKernel dlk;
  dlk.fs = std::move(fs);
  dlk.surface = &S;
  return dlk;
}

namespace {

void require_distinct(const RVec& d) {
  if (norm2(d) < 1e-14) throw ConfigError("double layer kernel needs distinct points");
}

Cplx cdotr(const CVec& a, const RVec& b) {
  Cplx s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CVec cmat_vec(const CMat& A, const RVec& x) {
  CVec out(A.size(), Cplx(0.0));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) out[i] += A[i][j] * x[j];
  return out;
}

CVec cmat_t_vec(const CMat& A, const RVec& x) {
  const size_t n = A.size();
  CVec out(n, Cplx(0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out[j] += A[i][j] * x[i];
  return out;
}

CVec project_out(const RVec& nu, CVec v) {
  Cplx nv = 0.0;
  for (size_t i = 0; i < v.size(); ++i) nv += nu[i] * v[i];
  for (size_t i = 0; i < v.size(); ++i) v[i] -= nv * nu[i];
  return v;
}

}  // namespace

Cplx dl_kernel(const DoubleLayerKernel& dlk, const SurfacePoint& x, const SurfacePoint& y) {
  const RVec d = sub(x.x, y.x);
  require_distinct(d);
  const RVec m = mat_vec(dlk.fs.a.a2, y.normal);
  const CVec g = dlk.fs.gradient(d);
  Cplx val = -cdotr(g, m);
  const Cplx nua1 = cdotr(dlk.fs.a.a1, y.normal);
  if (nua1 != 0.0) val -= nua1 * dlk.fs.value(d);
  return val;
}

std::array<Cplx, 5> dl_kernel_terms(const DoubleLayerKernel& dlk, const SurfacePoint& x,
                                    const SurfacePoint& y) {
  const FundamentalSolution& fs = dlk.fs;
  const int n = fs.n();
  const RVec d = sub(x.x, y.x);
  require_distinct(d);
  const double r = norm2(d);
  const RVec theta = scale(1.0 / r, d);
  const RVec m = mat_vec(fs.a.a2, y.normal);
  const RVec u = mat_vec(fs.fact.Tinv, d);
  const double sd = std::sqrt(fs.fact.detA2);
  std::array<Cplx, 5> K{};
  K[0] = -dot(d, y.normal) / (fs.sn * sd * std::pow(norm2(u), n));
  K[1] = -std::pow(r, 2 - n) * cdotr(fs.A2(theta, r), m);
  K[2] = -cdotr(fs.DB1(d), m) * std::log(r);
  K[3] = -cdotr(fs.DC(d), m);
  const Cplx nua1 = cdotr(fs.a.a1, y.normal);
  K[4] = (nua1 == 0.0) ? Cplx(0.0) : -nua1 * fs.value(d);
  return K;
}

Cplx dl_potential(const DoubleLayerKernel& dlk, const std::function<Cplx(const SurfacePoint&)>& mu,
                  const SurfacePoint& x, int level) {
  return integrate_truncated(
      *dlk.surface, x, 0.0,
      [&](const SurfacePoint& y) { return mu(y) * dl_kernel(dlk, x, y); }, level);
}

TangentialGradient dl_kernel_tangential_gradient(const DoubleLayerKernel& dlk,
                                                 const SurfacePoint& x, const SurfacePoint& y) {
  const FundamentalSolution& fs = dlk.fs;
  const int n = fs.n();
  const RVec d = sub(x.x, y.x);
  require_distinct(d);
  const double r = norm2(d);
  const RVec theta = scale(1.0 / r, d);
  const RVec& nx = x.normal;
  const RVec m = mat_vec(fs.a.a2, y.normal);
  const RVec u = mat_vec(fs.fact.Tinv, d);
  const double un = norm2(u);
  const double sd = std::sqrt(fs.fact.detA2);
  const double q = dot(d, y.normal);
  const RVec w = mat_t_vec(fs.fact.Tinv, u);  // (a2)^{-1} d

  TangentialGradient out;
  auto& J = out.addends;
  auto cvec = [n](const RVec& v, Cplx s) {
    CVec out(n);
    for (int i = 0; i < n; ++i) out[i] = s * v[i];
    return out;
  };

  J[0] = project_out(nx, cvec(w, n * q / (fs.sn * sd * std::pow(un, n + 2))));
  J[1] = project_out(nx, cvec(y.normal, -1.0 / (fs.sn * sd * std::pow(un, n))));
  if (n == 2) {
    J[2] = CVec(n, Cplx(0.0));  // (2 - n) factor
  } else {
    J[2] = project_out(nx, cvec(d, -(2.0 - n) * std::pow(r, -n) * cdotr(fs.A2(theta, r), m)));
  }
  J[3] = project_out(nx, [&] {
    CVec v = cmat_t_vec(fs.dA2_dy(theta, r), m);
    const Cplx sfac = -std::pow(r, 1 - n);
    for (auto& c : v) c *= sfac;
    return v;
  }());
  J[4] = project_out(nx, cvec(d, -cdotr(fs.dA2_dr(theta, r), m) * std::pow(r, 1 - n)));
  J[5] = project_out(nx, [&] {
    CVec v = cmat_vec(fs.HessB1(d), m);
    const Cplx sfac = -std::log(r);
    for (auto& c : v) c *= sfac;
    return v;
  }());
  J[6] = project_out(nx, cvec(d, -cdotr(fs.DB1(d), m) / (r * r)));
  J[7] = project_out(nx, [&] {
    CVec v = cmat_vec(fs.HessC(d), m);
    for (auto& c : v) c = -c;
    return v;
  }());
  const Cplx nua1 = cdotr(fs.a.a1, y.normal);
  if (nua1 == 0.0) {
    J[8] = CVec(n, Cplx(0.0));
  } else {
    CVec v = fs.gradient(d);
    for (auto& c : v) c *= -nua1;
    J[8] = project_out(nx, v);
  }

  out.total.assign(n, Cplx(0.0));
  for (const CVec& a : J)
    for (int i = 0; i < n; ++i) out.total[i] += a[i];
  return out;
}

double omega1(double r) {
  if (r < 0.0) throw ConfigError("omega1: negative argument");
  const double r1 = std::exp(-1.0);
  if (r == 0.0) return 0.0;
  if (r <= r1) return r * std::abs(std::log(r));
  return r1;  // r1 |ln r1|
}

double holder_quotient(const std::vector<SurfacePoint>& points, const std::vector<CVec>& values,
                       double beta, HolderModulus modulus) {
  if (points.size() < 2 || points.size() != values.size())
    throw ConfigError("holder_quotient: need matching samples at two points or more");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("holder_quotient: beta outside (0, 1]");
  double worst = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      const double dist = norm2(sub(points[i].x, points[j].x));
      if (dist < 1e-14) continue;
      double diff2 = 0.0;
      for (size_t c = 0; c < values[i].size(); ++c) diff2 += std::norm(values[i][c] - values[j][c]);
      const double den =
          modulus == HolderModulus::Plain ? std::pow(dist, beta) : omega1(dist);
      if (den > 0.0) worst = std::max(worst, std::sqrt(diff2) / den);
    }
  return worst;
}

}  // namespace layerpot
