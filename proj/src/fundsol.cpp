#include "layerpot/fundsol.hpp"

#include <cmath>

#include "layerpot/bessel.hpp"

namespace layerpot {

namespace {

constexpr int kMaxTerms = 400;
constexpr double kFdStep = 1e-6;

void require_nonzero(const RVec& x) {
  for (double v : x)
    if (v != 0.0) return;
  throw std::invalid_argument("fundamental solution evaluated at its singular point");
}

RVec unit_of(const RVec& x, double& r) {
  r = norm2(x);
  RVec th(x.size());
  for (size_t i = 0; i < x.size(); ++i) th[i] = x[i] / r;
  return th;
}

}  // namespace

double laplace_fund(int n, const RVec& x) {
  require_nonzero(x);
  const double r = norm2(x);
  if (n == 2) return std::log(r) / (2.0 * kPi);
  return std::pow(r, 2.0 - n) / ((2.0 - n) * unit_sphere_measure(n));
}

RVec laplace_fund_gradient(int n, const RVec& x) {
  require_nonzero(x);
  const double r = norm2(x);
  const double f = 1.0 / (unit_sphere_measure(n) * std::pow(r, n));
  return scale(f, x);
}

CMat czeros(int n) { return CMat(n, CVec(n, Cplx(0.0))); }

Cplx FundamentalSolution::principal_part(const RVec& x) const {
  require_nonzero(x);
  const RVec u = mat_vec(fact.Tinv, x);
  return laplace_fund(n(), u) / std::sqrt(fact.detA2);
}

CVec FundamentalSolution::principal_gradient(const RVec& x) const {
  // D(S_n o T^{-1})(x)/sqrt(det a2) = x^t (a2)^{-1} / (s_n sqrt(det a2) |T^{-1}x|^n)
  require_nonzero(x);
  const RVec u = mat_vec(fact.Tinv, x);
  const RVec w = mat_t_vec(fact.Tinv, u);  // (a2)^{-1} x
  const double f = 1.0 / (sn * std::sqrt(fact.detA2) * std::pow(norm2(u), n()));
  CVec g(n());
  for (int i = 0; i < n(); ++i) g[i] = f * w[i];
  return g;
}

Cplx FundamentalSolution::value(const RVec& x) const {
  if (value_override) return value_override(x);
  require_nonzero(x);
  double r;
  const RVec th = unit_of(x, r);
  Cplx v = principal_part(x);
  if (comp.A1) v += std::pow(r, 3.0 - n()) * comp.A1(th, r);
  Cplx logc = comp.B1 ? comp.B1(x) : Cplx(0.0);
  if (n() != 2) logc += comp.b0;
  if (logc != 0.0) v += logc * std::log(r);
  if (comp.C) v += comp.C(x);
  return v;
}

CVec FundamentalSolution::gradient(const RVec& x) const {
  if (gradient_override) return gradient_override(x);
  require_nonzero(x);
  double r;
  const RVec th = unit_of(x, r);
  CVec g = principal_gradient(x);
  if (comp.A2) {
    const CVec a2v = comp.A2(th, r);
    const double f = std::pow(r, 2.0 - n());
    for (int i = 0; i < n(); ++i) g[i] += f * a2v[i];
  }
  if (comp.B1) {
    const CVec db = DB1(x);
    const double lr = std::log(r);
    for (int i = 0; i < n(); ++i) g[i] += db[i] * lr;
  }
  if (comp.C) {
    const CVec dc = DC(x);
    for (int i = 0; i < n(); ++i) g[i] += dc[i];
  }
  return g;
}

Cplx FundamentalSolution::A1(const RVec& theta, double r) const {
  return comp.A1 ? comp.A1(theta, r) : Cplx(0.0);
}

CVec FundamentalSolution::A2(const RVec& theta, double r) const {
  return comp.A2 ? comp.A2(theta, r) : CVec(n(), Cplx(0.0));
}

CMat FundamentalSolution::dA2_dy(const RVec& theta, double r) const {
  if (comp.dA2_dy) return comp.dA2_dy(theta, r);
  CMat M = czeros(n());
  if (!comp.A2) return M;
  // Central differences of the radial extension A2(x/|x|, r) in x at x = theta.
  for (int j = 0; j < n(); ++j) {
    RVec xp(theta), xm(theta);
    xp[j] += kFdStep;
    xm[j] -= kFdStep;
    double rp, rm;
    const RVec tp = unit_of(xp, rp);
    const RVec tm = unit_of(xm, rm);
    const CVec vp = comp.A2(tp, r);
    const CVec vm = comp.A2(tm, r);
    for (int i = 0; i < n(); ++i) M[i][j] = (vp[i] - vm[i]) / (2.0 * kFdStep);
  }
  return M;
}

CVec FundamentalSolution::dA2_dr(const RVec& theta, double r) const {
  if (comp.dA2_dr) return comp.dA2_dr(theta, r);
  if (!comp.A2) return CVec(n(), Cplx(0.0));
  const CVec vp = comp.A2(theta, r + kFdStep);
  const CVec vm = comp.A2(theta, r - kFdStep);
  CVec out(n());
  for (int i = 0; i < n(); ++i) out[i] = (vp[i] - vm[i]) / (2.0 * kFdStep);
  return out;
}

Cplx FundamentalSolution::B1(const RVec& x) const { return comp.B1 ? comp.B1(x) : Cplx(0.0); }

CVec FundamentalSolution::DB1(const RVec& x) const {
  if (comp.DB1) return comp.DB1(x);
  CVec g(n(), Cplx(0.0));
  if (!comp.B1) return g;
  for (int j = 0; j < n(); ++j) {
    RVec xp(x), xm(x);
    xp[j] += kFdStep;
    xm[j] -= kFdStep;
    g[j] = (comp.B1(xp) - comp.B1(xm)) / (2.0 * kFdStep);
  }
  return g;
}

CMat FundamentalSolution::HessB1(const RVec& x) const {
  if (comp.HessB1) return comp.HessB1(x);
  CMat M = czeros(n());
  if (!comp.B1) return M;
  for (int j = 0; j < n(); ++j) {
    RVec xp(x), xm(x);
    xp[j] += kFdStep;
    xm[j] -= kFdStep;
    const CVec gp = DB1(xp);
    const CVec gm = DB1(xm);
    for (int i = 0; i < n(); ++i) M[i][j] = (gp[i] - gm[i]) / (2.0 * kFdStep);
  }
  return M;
}

Cplx FundamentalSolution::Cpart(const RVec& x) const { return comp.C ? comp.C(x) : Cplx(0.0); }

CVec FundamentalSolution::DC(const RVec& x) const {
  if (comp.DC) return comp.DC(x);
  CVec g(n(), Cplx(0.0));
  if (!comp.C) return g;
  for (int j = 0; j < n(); ++j) {
    RVec xp(x), xm(x);
    xp[j] += kFdStep;
    xm[j] -= kFdStep;
    g[j] = (comp.C(xp) - comp.C(xm)) / (2.0 * kFdStep);
  }
  return g;
}

CMat FundamentalSolution::HessC(const RVec& x) const {
  if (comp.HessC) return comp.HessC(x);
  CMat M = czeros(n());
  if (!comp.C) return M;
  for (int j = 0; j < n(); ++j) {
    RVec xp(x), xm(x);
    xp[j] += kFdStep;
    xm[j] -= kFdStep;
    const CVec gp = DC(xp);
    const CVec gm = DC(xm);
    for (int i = 0; i < n(); ++i) M[i][j] = (gp[i] - gm[i]) / (2.0 * kFdStep);
  }
  return M;
}

namespace {

bool is_identity(const RMat& A) {
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j)
      if (A(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

bool is_zero(const CVec& v) {
  for (const Cplx& c : v)
    if (c != 0.0) return false;
  return true;
}

// ---- Helmholtz in space ------------------------------------------------
//
//   S(x) = -e^{ikr}/(4 pi r),  r = |x|
//        = S_3(x) + A1(r) + C(x)
//   A1(r) = (1 - cos(kr))/(4 pi r)            (odd power series in r)
//   C(x)  = -i sin(kr)/(4 pi r) = FC(r^2)     (entire in x)
//
//   DS(x) = x/(4 pi r^3) + r^{-1} A2(theta, r) + DC(x),  A2 = theta * al2(r),
//   al2(r) = dA1/dr = (cos(kr) + kr sin(kr) - 1)/(4 pi r).
//
// al2 carries only the A1 part; the gradient assembly adds DC on its own,
// so Im(e^{ikr}(1 - ikr) - 1) must not leak into A2.
// Series branches take over below |kr| = 1/2 where the closed forms cancel.

struct Helm3 {
  double k;

  Cplx al1(double r) const {
    const double z = k * r;
    if (std::abs(z) >= 0.5) return (1.0 - std::cos(z)) / (4.0 * kPi * r);
    double term = 0.5 * z * z / r, sum = term;  // m=1: k^2 r /2
    for (int m = 2; m < kMaxTerms; ++m) {
      term *= -z * z / ((2.0 * m) * (2.0 * m - 1.0));
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum / (4.0 * kPi);
  }

  Cplx al2(double r) const {
    const double z = k * r;
    if (std::abs(z) >= 0.5)
      return (std::cos(z) + z * std::sin(z) - 1.0) / (4.0 * kPi * r);
    // sum_{m>=1} (-1)^m (1-2m) k^{2m} r^{2m-1} / (2m)!
    double term = 0.5 * k * k * r, sum = term;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -z * z / ((2.0 * m - 1.0) * (2.0 * m + 2.0));
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum / (4.0 * kPi);
  }

  Cplx al2p(double r) const {
    const double z = k * r;
    if (std::abs(z) >= 0.5)
      return (z * z * std::cos(z) - std::cos(z) - z * std::sin(z) + 1.0) /
             (4.0 * kPi * r * r);
    // sum_{m>=1} -(-1)^m (2m-1)^2 k^{2m} r^{2m-2} / (2m)!
    double term = 0.5 * k * k, sum = term;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -z * z * (2.0 * m + 1.0) /
              ((2.0 * m - 1.0) * (2.0 * m - 1.0) * (2.0 * m + 2.0));
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum / (4.0 * kPi);
  }

  // FC(s) = -i sin(k sqrt(s))/(4 pi sqrt(s)) and its s-derivatives.
  Cplx FC(double s) const {
    const double r = std::sqrt(s);
    if (k * r >= 0.5) return Cplx(0.0, -1.0) * std::sin(k * r) / (4.0 * kPi * r);
    double term = k, sum = k;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -k * k * s / ((2.0 * m) * (2.0 * m + 1.0));
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return Cplx(0.0, -sum / (4.0 * kPi));
  }

  Cplx FCp(double s) const {
    const double r = std::sqrt(s);
    if (k * r >= 0.5) {
      const double num = k * r * std::cos(k * r) - std::sin(k * r);
      return Cplx(0.0, -num / (8.0 * kPi * r * r * r));
    }
    // sum_{m>=1} (-1)^m m k^{2m+1} s^{m-1}/(2m+1)!
    double t = -k * k * k / 6.0;  // m = 1
    double acc = t;
    for (int m = 2; m < kMaxTerms; ++m) {
      t *= -k * k * s / ((2.0 * m) * (2.0 * m + 1.0));
      t *= static_cast<double>(m) / (m - 1.0);
      acc += t;
      if (std::abs(t) < 1e-16 * std::abs(acc)) break;
    }
    return Cplx(0.0, -acc / (4.0 * kPi));
  }

  Cplx FCpp(double s) const {
    const double r = std::sqrt(s);
    if (k * r >= 0.5) {
      const double kr = k * r;
      const double num = -kr * kr * std::sin(kr) - 3.0 * kr * std::cos(kr) + 3.0 * std::sin(kr);
      return Cplx(0.0, -num / (16.0 * kPi * std::pow(r, 5)));
    }
    // sum_{m>=2} (-1)^m m (m-1) k^{2m+1} s^{m-2}/(2m+1)!
    double t = 2.0 * std::pow(k, 5) / 120.0;  // m = 2
    double acc = t;
    for (int m = 3; m < kMaxTerms; ++m) {
      t *= -k * k * s / ((2.0 * m) * (2.0 * m + 1.0));
      t *= static_cast<double>(m) / (m - 2.0);
      acc += t;
      if (std::abs(t) < 1e-16 * std::abs(acc)) break;
    }
    return Cplx(0.0, -acc / (4.0 * kPi));
  }
};

// ---- Helmholtz in the plane -------------------------------------------
//
//   S(x) = (1/4) Y0(kr) - (i/4) J0(kr)
//        = S_2(x) + B1(x) ln r + C(x)
//   B1(x) = (J0(kr) - 1)/(2 pi) = FB(r^2)
//   C(x)  = c0 J0(kr) + (1/(2 pi)) H(r^2),  c0 = (ln(k/2)+gamma)/(2 pi) - i/4,
//   H(s)  = sum_{m>=1} (-1)^{m+1} H_m q^m/(m!)^2,  q = k^2 s/4.
//
//   A2(theta, r) = theta (J0(kr)-1)/(2 pi r) = theta FB(r^2)/r.

struct Helm2 {
  double k;

  double FB(double s) const {
    const double q = 0.25 * k * k * s;
    double term = 1.0, sum = 0.0;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      sum += term;
      if (std::abs(term) < 1e-16 * (std::abs(sum) + 1e-300)) break;
    }
    return sum / (2.0 * kPi);
  }

  double FBp(double s) const {
    // sum_{m>=1} (-1)^m m q^{m-1}/(m!)^2 * (k^2/4)
    const double q = 0.25 * k * k * s;
    double term = -1.0, sum = -1.0;  // m = 1 contribution before the k^2/4 factor
    for (int m = 2; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      term *= static_cast<double>(m) / (m - 1.0);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum * 0.25 * k * k / (2.0 * kPi);
  }

  double FBpp(double s) const {
    const double q = 0.25 * k * k * s;
    double term = 0.5, sum = 0.5;  // m = 2: m(m-1)/(m!)^2 = 2/4
    for (int m = 3; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      term *= static_cast<double>(m) / (m - 2.0);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum * std::pow(0.25 * k * k, 2) / (2.0 * kPi);
  }

  double Hser(double s) const {
    const double q = 0.25 * k * k * s;
    double term = 1.0, h = 0.0, sum = 0.0;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      h += 1.0 / m;
      sum += -term * h;
      if (std::abs(term * h) < 1e-16 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
  }

  double Hserp(double s) const {
    const double q = 0.25 * k * k * s;
    double term = 1.0, h = 1.0, sum = 1.0;  // m = 1: (-1)^{m+1} H_m m q^{m-1}/(m!)^2 = 1
    for (int m = 2; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      term *= static_cast<double>(m) / (m - 1.0);
      h += 1.0 / m;
      sum += term * h;
      if (std::abs(term * h) < 1e-16 * std::abs(sum)) break;
    }
    return sum * 0.25 * k * k;
  }

  double Hserpp(double s) const {
    const double q = 0.25 * k * k * s;
    double term = -0.5, h = 1.5, sum = term * h;  // m=2: (-1)^3 * 2/(2!)^2 * H_2
    term = -0.5;
    for (int m = 3; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      term *= static_cast<double>(m) / (m - 2.0);
      h += 1.0 / m;
      sum += term * h;
      if (std::abs(term * h) < 1e-16 * std::abs(sum)) break;
    }
    return sum * std::pow(0.25 * k * k, 2);
  }

  double J0s(double s) const {  // J0 as a series in s = r^2
    const double q = 0.25 * k * k * s;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < kMaxTerms; ++m) {
      term *= -q / (static_cast<double>(m) * m);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum;
  }

  Cplx c0() const { return Cplx((std::log(0.5 * k) + kEulerGamma) / (2.0 * kPi), -0.25); }

  Cplx FCv(double s) const { return c0() * J0s(s) + Hser(s) / (2.0 * kPi); }
  Cplx FCp(double s) const { return c0() * (2.0 * kPi * FBp(s)) + Hserp(s) / (2.0 * kPi); }
  Cplx FCpp(double s) const { return c0() * (2.0 * kPi * FBpp(s)) + Hserpp(s) / (2.0 * kPi); }

  double al2(double r) const { return FB(r * r) / r; }
  double al2p(double r) const { return 2.0 * r * FBp(r * r) / r - FB(r * r) / (r * r); }
};

// Shared glue for fundamental solutions whose remainder is a radial profile:
// A1 = al1(r), A2 = theta al2(r), B1 = FB(|x|^2), C = FC(|x|^2).
template <class Al2>
void attach_radial_a2(DecompositionComponents& c, int n, Al2 al2, std::function<Cplx(double)> al2p) {
  c.A2 = [n, al2](const RVec& th, double r) {
    const Cplx v = al2(r);
    CVec out(n);
    for (int i = 0; i < n; ++i) out[i] = th[i] * v;
    return out;
  };
  c.dA2_dy = [n, al2](const RVec& th, double r) {
    const Cplx v = al2(r);
    CMat M = czeros(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M[i][j] = ((i == j ? 1.0 : 0.0) - th[i] * th[j]) * v;
    return M;
  };
  c.dA2_dr = [n, al2p](const RVec& th, double r) {
    const Cplx v = al2p(r);
    CVec out(n);
    for (int i = 0; i < n; ++i) out[i] = th[i] * v;
    return out;
  };
}

std::function<CMat(const RVec&)> radial_hessian(int n, std::function<Cplx(double)> Fp,
                                                std::function<Cplx(double)> Fpp) {
  // Hessian of F(|x|^2): 2 F' I + 4 F'' x x^t.
  return [n, Fp, Fpp](const RVec& x) {
    const double s = dot(x, x);
    const Cplx a = 2.0 * Fp(s);
    const Cplx b = 4.0 * Fpp(s);
    CMat M = czeros(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M[i][j] = (i == j ? a : Cplx(0.0)) + b * x[i] * x[j];
    return M;
  };
}

}  // namespace

FundamentalSolution make_from_components(const CoefficientVector& a, DecompositionComponents comp) {
  FundamentalSolution fs;
  fs.a = a;
  fs.fact = factorize(a);
  fs.sn = unit_sphere_measure(a.n);
  fs.comp = std::move(comp);
  return fs;
}

FundamentalSolution make_fundamental_solution(const CoefficientVector& a) {
  const ValidationReport rep = validate(a);
  if (!rep.ok) throw ConfigError("make_fundamental_solution: " + rep.message);

  if (is_zero(a.a1) && a.a0 == 0.0) {
    // Principal part only; exact for any admissible a2.
    return make_from_components(a, {});
  }

  if (is_identity(a.a2) && is_zero(a.a1) && a.a0.imag() == 0.0 && a.a0.real() > 0.0) {
    const double k = std::sqrt(a.a0.real());
    const int n = a.n;
    DecompositionComponents c;
    if (n == 3) {
      Helm3 h{k};
      c.A1 = [h](const RVec&, double r) { return h.al1(r); };
      attach_radial_a2(c, n, [h](double r) { return h.al2(r); },
                       [h](double r) { return h.al2p(r); });
      c.C = [h](const RVec& x) { return h.FC(dot(x, x)); };
      c.DC = [h, n](const RVec& x) {
        const Cplx f = 2.0 * h.FCp(dot(x, x));
        CVec g(n);
        for (int i = 0; i < n; ++i) g[i] = f * x[i];
        return g;
      };
      c.HessC = radial_hessian(n, [h](double s) { return h.FCp(s); },
                               [h](double s) { return h.FCpp(s); });
      FundamentalSolution fs = make_from_components(a, std::move(c));
      fs.value_override = [k](const RVec& x) {
        require_nonzero(x);
        const double r = norm2(x);
        return -std::exp(Cplx(0.0, k * r)) / (4.0 * kPi * r);
      };
      return fs;
    }
    if (n == 2) {
      Helm2 h{k};
      c.B1 = [h](const RVec& x) { return Cplx(h.FB(dot(x, x))); };
      c.DB1 = [h, n](const RVec& x) {
        const double f = 2.0 * h.FBp(dot(x, x));
        CVec g(n);
        for (int i = 0; i < n; ++i) g[i] = f * x[i];
        return g;
      };
      c.HessB1 = radial_hessian(n, [h](double s) { return Cplx(h.FBp(s)); },
                                [h](double s) { return Cplx(h.FBpp(s)); });
      c.C = [h](const RVec& x) { return h.FCv(dot(x, x)); };
      c.DC = [h, n](const RVec& x) {
        const Cplx f = 2.0 * h.FCp(dot(x, x));
        CVec g(n);
        for (int i = 0; i < n; ++i) g[i] = f * x[i];
        return g;
      };
      c.HessC = radial_hessian(n, [h](double s) { return h.FCp(s); },
                               [h](double s) { return h.FCpp(s); });
      attach_radial_a2(c, n, [h](double r) { return Cplx(h.al2(r)); },
                       [h](double r) { return Cplx(h.al2p(r)); });
      FundamentalSolution fs = make_from_components(a, std::move(c));
      fs.value_override = [k](const RVec& x) {
        require_nonzero(x);
        const double z = k * norm2(x);
        return Cplx(0.25 * bessel_y0(z), -0.25 * bessel_j0(z));
      };
      return fs;
    }
    throw ConfigError("built-in Helmholtz fundamental solutions cover n = 2, 3 only");
  }

  throw ConfigError(
      "no built-in fundamental solution for these coefficients; supply components explicitly");
}

}  // namespace layerpot
