#include "layerpot/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace layerpot {

double unit_sphere_measure(int m) {
  // s_1 = 2 (two points), s_2 = 2*pi, s_3 = 4*pi, then the usual recursion
  // s_m = 2 pi^{m/2} / Gamma(m/2).
  if (m < 1) throw ConfigError("unit_sphere_measure: dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
}

RMat RMat::identity(int dim) {
  RMat I(dim);
  for (int i = 0; i < dim; ++i) I(i, i) = 1.0;
  return I;
}

RMat mat_mul(const RMat& A, const RMat& B) {
  RMat C(A.n);
  for (int i = 0; i < A.n; ++i)
    for (int k = 0; k < A.n; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < A.n; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

RMat transpose(const RMat& A) {
  RMat T(A.n);
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j) T(j, i) = A(i, j);
  return T;
}

RVec mat_vec(const RMat& A, const RVec& x) {
  RVec y(A.n, 0.0);
  for (int i = 0; i < A.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.n; ++j) s += A(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

RVec mat_t_vec(const RMat& A, const RVec& x) {
  RVec y(A.n, 0.0);
  for (int j = 0; j < A.n; ++j) {
    double s = 0.0;
    for (int i = 0; i < A.n; ++i) s += A(i, j) * x[i];
    y[j] = s;
  }
  return y;
}

double dot(const RVec& x, const RVec& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

Cplx cdot(const CVec& x, const RVec& y) {
  Cplx s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const RVec& x) { return std::sqrt(dot(x, x)); }

RVec axpy(double a, const RVec& x, const RVec& y) {
  RVec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = a * x[i] + y[i];
  return z;
}

RVec scale(double a, const RVec& x) {
  RVec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = a * x[i];
  return z;
}

RVec sub(const RVec& x, const RVec& y) {
  RVec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

RMat cholesky_lower(const RMat& A) {
  RMat L(A.n);
  for (int j = 0; j < A.n; ++j) {
    double d = A(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d <= 0.0) throw ConfigError("cholesky_lower: matrix is not positive definite");
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < A.n; ++i) {
      double s = A(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return L;
}

RMat invert_lower(const RMat& L) {
  RMat M(L.n);
  for (int j = 0; j < L.n; ++j) {
    M(j, j) = 1.0 / L(j, j);
    for (int i = j + 1; i < L.n; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += L(i, k) * M(k, j);
      M(i, j) = -s / L(i, i);
    }
  }
  return M;
}

RVec jacobi_eigenvalues(RMat A, int max_sweeps) {
  const int n = A.n;
  if (n == 1) return {A(0, 0)};
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  RVec ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double max_abs(const RMat& A) {
  double m = 0.0;
  for (double v : A.a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace layerpot
