#pragma once

#include <vector>

#include "layerpot/types.hpp"

namespace layerpot {

// Dense square matrix, row major.  Sizes here are tiny (ambient dimension),
// so everything below is direct arithmetic with no blocking or pivot games.
struct RMat {
  int n = 0;
  std::vector<double> a;  // n*n entries

  RMat() = default;
  explicit RMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static RMat identity(int dim);
};

RMat mat_mul(const RMat& A, const RMat& B);
RMat transpose(const RMat& A);
RVec mat_vec(const RMat& A, const RVec& x);
RVec mat_t_vec(const RMat& A, const RVec& x);  // A^t x

double dot(const RVec& x, const RVec& y);
Cplx cdot(const CVec& x, const RVec& y);  // sum x_i y_i, no conjugation
double norm2(const RVec& x);
RVec axpy(double a, const RVec& x, const RVec& y);  // a*x + y
RVec scale(double a, const RVec& x);
RVec sub(const RVec& x, const RVec& y);

// Lower-triangular Cholesky factor L with L L^t = A.  Throws ConfigError if a
// pivot is not strictly positive.
RMat cholesky_lower(const RMat& A);

// Inverse of a lower-triangular matrix by forward substitution.
RMat invert_lower(const RMat& L);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Exact small-matrix path; input asymmetry beyond roundoff is the caller's bug.
RVec jacobi_eigenvalues(RMat A, int max_sweeps = 64);

double max_abs(const RMat& A);

}  // namespace layerpot
