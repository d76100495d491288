#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace layerpot {

using Real = double;
using Cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<Cplx>;

// Raised for malformed user input (bad JSON, dimension mismatch, invalid flags).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an iterative computation fails to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Surface measure of the unit sphere boundary in R^m.  The m = 1 value is the
// counting measure of {-1, +1}.
double unit_sphere_measure(int m);

}  // namespace layerpot
