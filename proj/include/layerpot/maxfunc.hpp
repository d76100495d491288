#pragma once

#include <array>
#include <string>
#include <vector>

#include "layerpot/kernels.hpp"

namespace layerpot {

// Kernel of two surface points.  Convolution kernels bind k(x - y); the
// tangential-gradient sweeps also need the normal at x, which is why the
// general form takes both points.
using PointKernel = std::function<Cplx(const SurfacePoint& x, const SurfacePoint& y)>;

PointKernel convolution_kernel(const HomogeneousKernel& k);

struct SweepConfig {
  int centerCount = 0;        // 0 picks the dimension default: 256 (n=2) / 200 (n=3)
  bool withPatchBases = true; // append the chart base points to the center set
  int level = 0;              // base quadrature level; the check pass runs at level+1
};

// Truncated-integral sweep over a center set and a radius grid.  values[i][j]
// is |integral over {|y - x_i| >= radii[j]}| at the base level; the same
// quantities are recomputed one level finer on radiiFine (the grid with the
// smallest radius additionally halved), and maxEstimateFine / maxEstimate is
// the number the finiteness protocol looks at: near 1 for a bounded maximal
// function, visibly above 1 for a divergent one.
struct TruncatedIntegralReport {
  std::string surfaceId;
  std::string kernelId;
  std::vector<SurfacePoint> centers;
  std::vector<double> radii;
  std::vector<double> radiiFine;
  std::vector<std::vector<double>> values;      // [center][radius]
  std::vector<std::vector<double>> valuesFine;  // [center][radiiFine]
  std::vector<std::vector<char>> flags;         // per-entry two-level agreement
  double maxEstimate = 0.0;
  double maxEstimateFine = 0.0;
  double stabilityRatio = 1.0;
  // Largest per-entry movement between the two levels on the shared grid.
  // When the estimate itself is of this size (noiseDominated), the sweep is
  // measuring quadrature noise around a vanishing true value (symmetric
  // surfaces cancel these integrals exactly) and the ratio is meaningless;
  // a genuinely divergent sweep has maxEstimate far above maxDeviation and
  // shows its growth in stabilityRatio instead.
  double maxDeviation = 0.0;
  bool noiseDominated = false;
};

TruncatedIntegralReport maximal_sweep(const BoundarySurface& S, const PointKernel& k,
                                      const std::string& kernelId,
                                      const std::vector<double>& radii,
                                      const SweepConfig& cfg = {});

TruncatedIntegralReport maximal_sweep(const BoundarySurface& S, const HomogeneousKernel& k,
                                      const std::vector<double>& radii,
                                      const SweepConfig& cfg = {});

// Sweep of the h-th component of grad S(x - y) over truncation radii.
TruncatedIntegralReport gradS_maximal(const BoundarySurface& S, const FundamentalSolution& fs,
                                      int h, const std::vector<double>& radii,
                                      const SweepConfig& cfg = {});

// Annulus integrals sup_x |integral over {eps <= |y - x| < r}| against r,
// with a log-log slope fit.  Linear growth (slope 1) is the expected scaling
// on the surfaces built here; values that never rise above the quadrature
// noise floor are reported as such instead of being force-fitted.
struct ScalingFit {
  double eps = 0.0;
  std::vector<double> radii;
  std::vector<double> values;  // sup over centers, per radius
  double slope = 0.0;
  double residual = 0.0;       // rms misfit of the log-log line
  double cTilde = 0.0;         // max of value / (||k|| r) over the grid
  double noiseFloor = 0.0;
  bool belowNoiseFloor = false;
};

ScalingFit annulus_difference_scaling(const BoundarySurface& S, const HomogeneousKernel& k,
                                      double eps, const std::vector<double>& radii,
                                      const SweepConfig& cfg = {});

// Sweeps of the tangential-gradient kernel of the double layer potential:
// the total and each of the nine addends separately, all from one quadrature
// pass per center.  Entry values take the largest component magnitude over
// the ambient index h, so a stable maxEstimate certifies every component.
struct MainTheoremReport {
  TruncatedIntegralReport total;
  std::array<TruncatedIntegralReport, 9> addends;
};

MainTheoremReport main_theorem_sweep(const BoundarySurface& S, const DoubleLayerKernel& dlk,
                                     const std::vector<double>& radii,
                                     const SweepConfig& cfg = {});

// Raw truncated integrals for one center: blocks[b][j] is the complex
// n-vector integral of block b (0 the total, then the nine addends) outside
// radius radii[j].  Used to check that the per-addend sweeps assemble to the
// total before any absolute value is taken.
std::vector<std::vector<CVec>> tangential_blocks(const BoundarySurface& S,
                                                 const DoubleLayerKernel& dlk,
                                                 const SurfacePoint& x,
                                                 const std::vector<double>& radii,
                                                 int level = 0);

}  // namespace layerpot
