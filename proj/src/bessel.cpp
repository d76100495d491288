#include "layerpot/bessel.hpp"

#include <cmath>

namespace layerpot {

namespace {

constexpr int kMaxTerms = 400;
constexpr double kMaxArg = 30.0;

void check_domain(double z) {
  if (!(std::abs(z) <= kMaxArg))
    throw ConvergenceError("bessel series: |z| exceeds supported domain (30)");
}

}  // namespace

double bessel_j0(double z) {
  check_domain(z);
  const double q = -0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < kMaxTerms; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw ConvergenceError("bessel_j0: series did not converge");
}

double bessel_j1(double z) {
  check_domain(z);
  const double q = -0.25 * z * z;
  double term = 0.5 * z, sum = term;
  for (int m = 1; m < kMaxTerms; ++m) {
    term *= q / (static_cast<double>(m) * (m + 1));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw ConvergenceError("bessel_j1: series did not converge");
}

double bessel_y0(double z) {
  check_domain(z);
  if (!(z > 0.0)) throw ConfigError("bessel_y0: argument must be positive");
  // Y0 = (2/pi)(ln(z/2) + gamma) J0(z) + (2/pi) sum_{m>=1} (-1)^{m+1} H_m q^m/(m!)^2,
  // q = z^2/4.
  const double q = 0.25 * z * z;
  double term = 1.0, h = 0.0, sum = 0.0;
  for (int m = 1; m < kMaxTerms; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    h += 1.0 / m;
    const double add = -term * h;  // (-1)^{m+1} q^m/(m!)^2 * H_m
    sum += add;
    if (std::abs(add) < 1e-16 * (std::abs(sum) + 1e-300)) break;
  }
  return (2.0 / kPi) * ((std::log(0.5 * z) + kEulerGamma) * bessel_j0(z) + sum);
}

double bessel_y1(double z) {
  check_domain(z);
  if (!(z > 0.0)) throw ConfigError("bessel_y1: argument must be positive");
  // Y1 = (2/pi)(ln(z/2) + gamma) J1(z) - 2/(pi z)
  //      - (1/pi) sum_{m>=0} (-1)^m (H_m + H_{m+1}) (z/2)^{2m+1} / (m!(m+1)!).
  const double q = -0.25 * z * z;
  double term = 0.5 * z;  // (z/2)^{2m+1}/(m!(m+1)!) at m = 0, with sign
  double hm = 0.0, hm1 = 1.0;
  double sum = term * (hm + hm1);
  for (int m = 1; m < kMaxTerms; ++m) {
    term *= q / (static_cast<double>(m) * (m + 1));
    hm += 1.0 / m;
    hm1 += 1.0 / (m + 1);
    const double add = term * (hm + hm1);
    sum += add;
    if (std::abs(add) < 1e-16 * (std::abs(sum) + 1e-300)) break;
  }
  return (2.0 / kPi) * (std::log(0.5 * z) + kEulerGamma) * bessel_j1(z)
         - 2.0 / (kPi * z) - sum / kPi;
}

}  // namespace layerpot
