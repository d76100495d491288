#include "layerpot/coeffs.hpp"

#include <cmath>

namespace layerpot {

ValidationReport validate(const CoefficientVector& a) {
  ValidationReport rep;
  if (a.n < 2) {
    rep.message = "dimension must be >= 2";
    return rep;
  }
  if (a.a2.n != a.n || static_cast<int>(a.a1.size()) != a.n) {
    rep.message = "coefficient sizes do not match dimension";
    return rep;
  }
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j)
      if (a.a2(i, j) != a.a2(j, i)) {
        rep.message = "a2 is not symmetric";
        return rep;
      }
  const RVec ev = jacobi_eigenvalues(a.a2);
  rep.minEigenvalue = ev.front();
  if (!(rep.minEigenvalue > 0.0)) {
    rep.message = "a2 is not positive definite";
    return rep;
  }
  rep.ok = true;
  rep.message = "ok";
  return rep;
}

Factorization factorize(const CoefficientVector& a) {
  const ValidationReport rep = validate(a);
  if (!rep.ok) throw ConfigError("factorize: " + rep.message);
  Factorization f;
  f.T = cholesky_lower(a.a2);
  f.Tinv = invert_lower(f.T);
  double p = 1.0;
  for (int i = 0; i < a.n; ++i) p *= f.T(i, i);
  f.detA2 = p * p;
  f.opNormT = std::sqrt(jacobi_eigenvalues(a.a2).back());
  return f;
}

namespace {

Cplx fd_gradient_comp(const FieldProbe& u, RVec x, int i, double h) {
  x[i] += h;
  const Cplx up = u.value(x);
  x[i] -= 2.0 * h;
  const Cplx um = u.value(x);
  return (up - um) / (2.0 * h);
}

Cplx fd_second(const FieldProbe& u, RVec x, int i, int j, double h) {
  if (i == j) {
    const Cplx u0 = u.value(x);
    x[i] += h;
    const Cplx up = u.value(x);
    x[i] -= 2.0 * h;
    const Cplx um = u.value(x);
    return (up - 2.0 * u0 + um) / (h * h);
  }
  RVec y = x;
  y[i] += h; y[j] += h;
  const Cplx upp = u.value(y);
  y[j] -= 2.0 * h;
  const Cplx upm = u.value(y);
  y[i] -= 2.0 * h;
  const Cplx umm = u.value(y);
  y[j] += 2.0 * h;
  const Cplx ump = u.value(y);
  return (upp - upm - ump + umm) / (4.0 * h * h);
}

}  // namespace

Cplx apply_operator(const CoefficientVector& a, const FieldProbe& u, const RVec& x) {
  if (static_cast<int>(x.size()) != a.n) throw ConfigError("apply_operator: point dimension mismatch");
  if (!u.value) throw ConfigError("apply_operator: field probe has no value callback");
  const double h = u.fd_scale * (1.0 + norm2(x));
  Cplx out = a.a0 * u.value(x);
  for (int l = 0; l < a.n; ++l) {
    if (a.a1[l] != 0.0) {
      const Cplx dl = u.gradient ? u.gradient(x)[l] : fd_gradient_comp(u, x, l, h);
      out += a.a1[l] * dl;
    }
  }
  for (int l = 0; l < a.n; ++l)
    for (int j = 0; j < a.n; ++j) {
      if (a.a2(l, j) == 0.0) continue;
      const Cplx dlj = u.second ? u.second(x, l, j) : fd_second(u, x, l, j, h);
      out += a.a2(l, j) * dlj;
    }
  return out;
}

CoefficientVector preset_operator(const std::string& name, double k) {
  CoefficientVector a;
  auto make = [&](int n) {
    a.n = n;
    a.a2 = RMat::identity(n);
    a.a1.assign(n, 0.0);
    a.a0 = 0.0;
  };
  if (name == "laplace2d") {
    make(2);
  } else if (name == "laplace3d") {
    make(3);
  } else if (name == "helmholtz2d") {
    if (k <= 0.0) throw ConfigError("helmholtz preset needs a positive wavenumber");
    make(2);
    a.a0 = k * k;
  } else if (name == "helmholtz3d") {
    if (k <= 0.0) throw ConfigError("helmholtz preset needs a positive wavenumber");
    make(3);
    a.a0 = k * k;
  } else if (name == "aniso2d") {
    make(2);
    a.a2(0, 0) = 2.0; a.a2(0, 1) = 1.0;
    a.a2(1, 0) = 1.0; a.a2(1, 1) = 2.0;
  } else {
    throw ConfigError("unknown operator preset: " + name);
  }
  return a;
}

}  // namespace layerpot
