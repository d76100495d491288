#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "layerpot/coeffs.hpp"
#include "layerpot/fundsol.hpp"
#include "layerpot/linalg.hpp"
#include "layerpot/rng.hpp"

using namespace layerpot;

namespace {

RMat matrix(int n, std::initializer_list<double> vals) {
  RMat m(n);
  auto it = vals.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = *it++;
  return m;
}

CoefficientVector plain(int n, RMat a2) {
  CoefficientVector c;
  c.n = n;
  c.a2 = std::move(a2);
  c.a1.assign(n, 0.0);
  return c;
}

RMat random_spd(Rng& rng, int n) {
  RMat g(n), a2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = i == j ? 0.3 * n : 0.0;
      for (int l = 0; l < n; ++l) s += g(i, l) * g(j, l);
      a2(i, j) = s;
    }
  return a2;
}

}  // namespace

TEST_CASE("validate: identity, indefinite, anisotropic") {
  const auto ok3 = validate(plain(3, matrix(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})));
  CHECK(ok3.ok);
  CHECK(ok3.minEigenvalue == doctest::Approx(1.0));

  const auto bad = validate(plain(2, matrix(2, {1, 0, 0, -1})));
  CHECK_FALSE(bad.ok);
  CHECK(bad.minEigenvalue < 0.0);

  // eigenvalues of [[2,1],[1,2]] are 1 and 3 (characteristic polynomial)
  const auto aniso = validate(plain(2, matrix(2, {2, 1, 1, 2})));
  CHECK(aniso.ok);
  CHECK(aniso.minEigenvalue == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_FALSE(validate(plain(2, matrix(2, {1, 0.5, 0.25, 1}))).ok);  // asymmetric
}

TEST_CASE("factorize: explicit factors and inverse") {
  const auto id = factorize(plain(3, matrix(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})));
  CHECK(id.detA2 == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id.T(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  const auto diag = factorize(plain(2, matrix(2, {4, 0, 0, 1})));
  CHECK(diag.T(0, 0) == doctest::Approx(2.0));
  CHECK(diag.T(1, 1) == doctest::Approx(1.0));
  CHECK(diag.detA2 == doctest::Approx(4.0));

  const auto an = factorize(plain(2, matrix(2, {2, 1, 1, 2})));
  CHECK(an.detA2 == doctest::Approx(3.0).epsilon(1e-14));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int l = 0; l < 2; ++l) s += an.T(i, l) * an.T(j, l);
      CHECK(std::abs(s - (i == j ? 2.0 : 1.0)) <= 1e-12);
    }

  CHECK_THROWS_AS(factorize(plain(2, matrix(2, {1, 0, 0, -1}))), ConfigError);
}

TEST_CASE("factorize: random SPD reconstruction and norm inequality") {
  Rng rng(77);
  for (const int n : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const CoefficientVector c = plain(n, random_spd(rng, n));
      const Factorization f = factorize(c);
      double scale = 0.0, err = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += f.T(i, l) * f.T(j, l);
          err = std::max(err, std::abs(s - c.a2(i, j)));
          scale = std::max(scale, std::abs(c.a2(i, j)));
        }
      CHECK(err <= 1e-12 * scale);
      // (T^-1)^t T^-1 inverts a2: a2 (T^-1)^t T^-1 = I
      double identErr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double e = 0.0;
          for (int l = 0; l < n; ++l) {
            double w = 0.0;
            for (int m = 0; m < n; ++m) w += f.Tinv(m, l) * f.Tinv(m, j);
            e += c.a2(i, l) * w;
          }
          identErr = std::max(identErr, std::abs(e - (i == j ? 1.0 : 0.0)));
        }
      CHECK(identErr <= 1e-12);
      for (int s = 0; s < 10; ++s) {
        const RVec xi = rng.unit_vector(n);
        CHECK(norm2(mat_vec(f.Tinv, xi)) * f.opNormT >= 1.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("apply_operator: polynomial probes") {
  FieldProbe sq;
  sq.value = [](const RVec& x) { return Cplx(x[0] * x[0]); };
  CHECK(std::abs(apply_operator(preset_operator("laplace3d"), sq, {0.3, -0.1, 0.7}) - 2.0) <=
        1e-6);

  FieldProbe mixed;
  mixed.value = [](const RVec& x) { return Cplx(x[0] * x[1]); };
  CoefficientVector an = preset_operator("aniso2d");
  CHECK(std::abs(apply_operator(an, mixed, {0.2, 0.4}) - 2.0) <= 1e-6);
}

TEST_CASE("apply_operator annihilates the fundamental solution off 0") {
  const CoefficientVector c = preset_operator("helmholtz3d", 2.0);
  const FundamentalSolution fs = make_fundamental_solution(c);
  FieldProbe u;
  u.value = [&fs](const RVec& x) { return fs.value(x); };
  Rng rng(5);
  for (int i = 0; i < 12; ++i) {
    RVec x = rng.unit_vector(3);
    for (double& v : x) v *= rng.uniform(0.4, 1.5);
    // scale by the leading derivative magnitude |D^2 S| ~ 1/(4 pi |x|^3)
    const double lead = 1.0 / (4.0 * kPi * std::pow(norm2(x), 3));
    CHECK(std::abs(apply_operator(c, u, x)) <= 1e-5 * lead + 1e-7);
  }
}

TEST_CASE("presets: shapes and rejection") {
  const CoefficientVector h2 = preset_operator("helmholtz2d", 3.0);
  CHECK(h2.n == 2);
  CHECK(h2.a0 == Cplx(9.0));
  const CoefficientVector an = preset_operator("aniso2d");
  CHECK(an.a2(0, 1) == 1.0);
  CHECK_THROWS_AS(preset_operator("biharmonic"), ConfigError);
  CHECK_THROWS_AS(preset_operator("helmholtz3d", -1.0), ConfigError);
}
