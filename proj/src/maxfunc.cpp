#include "layerpot/maxfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "layerpot/linalg.hpp"
#include "layerpot/parallel.hpp"

namespace layerpot {

namespace {

std::vector<SurfacePoint> sweep_centers(const BoundarySurface& S, const SweepConfig& cfg) {
  const int count = cfg.centerCount > 0 ? cfg.centerCount : (S.n == 2 ? 256 : 200);
  return S.quasi_uniform_points(count, cfg.withPatchBases);
}

std::vector<double> checked_radii(std::vector<double> radii) {
  if (radii.empty()) throw ConfigError("sweep needs a nonempty radius grid");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.front() <= 0.0) throw ConfigError("sweep radii must be positive");
  return radii;
}

using IntegrandFactory = std::function<Integrand(const SurfacePoint& x)>;

// Shared sweep engine.  Each block is a `width`-component slice of one
// integrand evaluation; its per-entry value is the largest component
// magnitude.  Both quadrature levels run on the extended grid (smallest
// radius halved), one truncated_family pass each per center.
std::vector<TruncatedIntegralReport> run_sweep(const BoundarySurface& S,
                                               const std::vector<std::string>& blockIds,
                                               int width, const IntegrandFactory& make,
                                               const std::vector<double>& radii,
                                               const SweepConfig& cfg) {
  const int nblocks = static_cast<int>(blockIds.size());
  const int ncomp = nblocks * width;
  const auto centers = sweep_centers(S, cfg);
  const int nc = static_cast<int>(centers.size());
  const int nr = static_cast<int>(radii.size());

  std::vector<double> fineGrid;
  fineGrid.reserve(nr + 1);
  fineGrid.push_back(0.5 * radii.front());
  fineGrid.insert(fineGrid.end(), radii.begin(), radii.end());
  const int nf = nr + 1;

  // raw[center][block * nf + j], base level and one level finer
  std::vector<std::vector<double>> base(nc), fine(nc);
  parallel_for(nc, [&](int ci) {
    const Integrand f = make(centers[ci]);
    const FamilyResult f0 = truncated_family(S, centers[ci], fineGrid, ncomp, f, cfg.level);
    const FamilyResult f1 = truncated_family(S, centers[ci], fineGrid, ncomp, f, cfg.level + 1);
    base[ci].assign(static_cast<size_t>(nblocks) * nf, 0.0);
    fine[ci].assign(static_cast<size_t>(nblocks) * nf, 0.0);
    for (int j = 0; j < nf; ++j) {
      for (int b = 0; b < nblocks; ++b) {
        double v0 = 0.0, v1 = 0.0;
        for (int h = 0; h < width; ++h) {
          v0 = std::max(v0, std::abs(f0.truncated[j][b * width + h]));
          v1 = std::max(v1, std::abs(f1.truncated[j][b * width + h]));
        }
        base[ci][b * nf + j] = v0;
        fine[ci][b * nf + j] = v1;
      }
    }
  });

  std::vector<TruncatedIntegralReport> out(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    TruncatedIntegralReport& r = out[b];
    r.surfaceId = S.id;
    r.kernelId = blockIds[b];
    r.centers = centers;
    r.radii = radii;
    r.radiiFine = fineGrid;
    r.values.assign(nc, std::vector<double>(nr, 0.0));
    r.valuesFine.assign(nc, std::vector<double>(nf, 0.0));
    r.flags.assign(nc, std::vector<char>(nr, 0));
    for (int ci = 0; ci < nc; ++ci) {
      for (int j = 0; j < nf; ++j) {
        const double v1 = fine[ci][b * nf + j];
        r.valuesFine[ci][j] = v1;
        r.maxEstimateFine = std::max(r.maxEstimateFine, v1);
        if (j > 0) {
          const double v0 = base[ci][b * nf + j];
          r.values[ci][j - 1] = v0;
          r.maxEstimate = std::max(r.maxEstimate, v0);
        }
      }
    }
    // A value passes when one refinement level moves it by under 2%, judged
    // against the larger of the entry itself and 5% of the sweep maximum so
    // that near-cancellation entries are held to an absolute scale instead.
    for (int ci = 0; ci < nc; ++ci) {
      for (int j = 0; j < nr; ++j) {
        const double v0 = r.values[ci][j];
        const double v1 = r.valuesFine[ci][j + 1];
        r.maxDeviation = std::max(r.maxDeviation, std::abs(v1 - v0));
        const double ref = std::max({v0, v1, 0.05 * r.maxEstimateFine});
        r.flags[ci][j] = std::abs(v1 - v0) <= 0.02 * ref + 1e-14 ? 1 : 0;
      }
    }
    r.stabilityRatio = r.maxEstimate > 0.0
                           ? r.maxEstimateFine / r.maxEstimate
                           : (r.maxEstimateFine > 0.0 ? std::numeric_limits<double>::infinity()
                                                      : 1.0);
    r.noiseDominated = r.maxEstimateFine <= 5.0 * r.maxDeviation + 1e-14;
  }
  return out;
}

}  // namespace

PointKernel convolution_kernel(const HomogeneousKernel& k) {
  return [k](const SurfacePoint& x, const SurfacePoint& y) { return k.eval(sub(x.x, y.x)); };
}

TruncatedIntegralReport maximal_sweep(const BoundarySurface& S, const PointKernel& k,
                                      const std::string& kernelId,
                                      const std::vector<double>& radii, const SweepConfig& cfg) {
  const IntegrandFactory make = [&k](const SurfacePoint& x) {
    return [&k, x](const SurfacePoint& y, std::span<Cplx> out) { out[0] = k(x, y); };
  };
  return std::move(run_sweep(S, {kernelId}, 1, make, checked_radii(radii), cfg)[0]);
}

TruncatedIntegralReport maximal_sweep(const BoundarySurface& S, const HomogeneousKernel& k,
                                      const std::vector<double>& radii, const SweepConfig& cfg) {
  if (k.n != S.n) throw ConfigError("kernel dimension does not match the surface");
  return maximal_sweep(S, convolution_kernel(k), k.id, radii, cfg);
}

TruncatedIntegralReport gradS_maximal(const BoundarySurface& S, const FundamentalSolution& fs,
                                      int h, const std::vector<double>& radii,
                                      const SweepConfig& cfg) {
  if (fs.n() != S.n) throw ConfigError("fundamental solution dimension does not match the surface");
  if (h < 0 || h >= S.n) throw ConfigError("gradient component out of range");
  const PointKernel k = [&fs, h](const SurfacePoint& x, const SurfacePoint& y) {
    return fs.gradient(sub(x.x, y.x))[h];
  };
  return maximal_sweep(S, k, "grad_fs[" + std::to_string(h) + "]", radii, cfg);
}

ScalingFit annulus_difference_scaling(const BoundarySurface& S, const HomogeneousKernel& k,
                                      double eps, const std::vector<double>& radiiIn,
                                      const SweepConfig& cfg) {
  if (k.n != S.n) throw ConfigError("kernel dimension does not match the surface");
  if (!k.isOdd) throw ConfigError("annulus scaling is stated for odd kernels");
  const auto radii = checked_radii(radiiIn);
  if (!(eps > 0.0) || eps >= radii.front())
    throw ConfigError("annulus scaling needs 0 < eps < smallest radius");

  const auto centers = sweep_centers(S, cfg);
  const int nc = static_cast<int>(centers.size());
  const int nr = static_cast<int>(radii.size());
  std::vector<double> grid;
  grid.reserve(nr + 1);
  grid.push_back(eps);
  grid.insert(grid.end(), radii.begin(), radii.end());

  // Annulus values come from partial sums of the per-bin integrals, never
  // from differences of two truncations, so small values stay resolved.
  std::vector<std::vector<double>> v0(nc), v1(nc);
  parallel_for(nc, [&](int ci) {
    const Integrand f = [&k, x = centers[ci]](const SurfacePoint& y, std::span<Cplx> out) {
      out[0] = k.eval(sub(x.x, y.x));
    };
    for (int pass = 0; pass < 2; ++pass) {
      const FamilyResult fam = truncated_family(S, centers[ci], grid, 1, f, cfg.level + pass);
      auto& dst = pass ? v1[ci] : v0[ci];
      dst.assign(nr, 0.0);
      Cplx run = 0.0;
      for (int j = 0; j < nr; ++j) {  // annuli[j] covers [grid[j], grid[j+1])
        run += fam.annuli[j][0];
        dst[j] = std::abs(run);
      }
    }
  });

  ScalingFit fit;
  fit.eps = eps;
  fit.radii = radii;
  fit.values.assign(nr, 0.0);
  // Noise is judged per radius: a point enters the fit only when its value
  // stands clear of its own movement under one refinement level.
  std::vector<double> dev(nr, 0.0);
  for (int j = 0; j < nr; ++j) {
    for (int ci = 0; ci < nc; ++ci) {
      fit.values[j] = std::max(fit.values[j], v1[ci][j]);
      dev[j] = std::max(dev[j], std::abs(v1[ci][j] - v0[ci][j]));
    }
  }
  // The inner radius offsets every value by O(eps), so the slope is fitted
  // only from radii where that offset is under ten percent.
  std::vector<double> lx, ly;
  for (int j = 0; j < nr; ++j) {
    fit.cTilde = std::max(fit.cTilde, fit.values[j] / (k.norm() * radii[j]));
    fit.noiseFloor = std::max(fit.noiseFloor, dev[j]);
    if (radii[j] >= 10.0 * eps && fit.values[j] > 5.0 * dev[j] + 1e-13 * k.norm()) {
      lx.push_back(std::log(radii[j]));
      ly.push_back(std::log(fit.values[j]));
    }
  }
  if (lx.size() < 3) {
    fit.belowNoiseFloor = true;
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - my - fit.slope * (lx[i] - mx);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(lx.size()));
  return fit;
}

namespace {

Integrand tangential_integrand(const DoubleLayerKernel& dlk, const SurfacePoint& x, int n) {
  return [&dlk, x, n](const SurfacePoint& y, std::span<Cplx> out) {
    const TangentialGradient tg = dl_kernel_tangential_gradient(dlk, x, y);
    for (int h = 0; h < n; ++h) out[h] = tg.total[h];
    for (int j = 0; j < 9; ++j)
      for (int h = 0; h < n; ++h) out[(1 + j) * n + h] = tg.addends[j][h];
  };
}

}  // namespace

MainTheoremReport main_theorem_sweep(const BoundarySurface& S, const DoubleLayerKernel& dlk,
                                     const std::vector<double>& radii, const SweepConfig& cfg) {
  if (dlk.fs.n() != S.n) throw ConfigError("operator dimension does not match the surface");
  std::vector<std::string> ids = {"dl_grad_total"};
  for (int j = 1; j <= 9; ++j) ids.push_back("dl_grad_J" + std::to_string(j));
  const int n = S.n;
  const IntegrandFactory make = [&dlk, n](const SurfacePoint& x) {
    return tangential_integrand(dlk, x, n);
  };
  auto reps = run_sweep(S, ids, n, make, checked_radii(radii), cfg);
  MainTheoremReport out;
  out.total = std::move(reps[0]);
  for (int j = 0; j < 9; ++j) out.addends[j] = std::move(reps[1 + j]);
  return out;
}

std::vector<std::vector<CVec>> tangential_blocks(const BoundarySurface& S,
                                                 const DoubleLayerKernel& dlk,
                                                 const SurfacePoint& x,
                                                 const std::vector<double>& radii, int level) {
  const int n = S.n;
  const auto rs = checked_radii(radii);
  const FamilyResult fam =
      truncated_family(S, x, rs, 10 * n, tangential_integrand(dlk, x, n), level);
  std::vector<std::vector<CVec>> blocks(10, std::vector<CVec>(rs.size()));
  for (int b = 0; b < 10; ++b)
    for (size_t j = 0; j < rs.size(); ++j) {
      CVec v(n);
      for (int h = 0; h < n; ++h) v[h] = fam.truncated[j][b * n + h];
      blocks[b][j] = std::move(v);
    }
  return blocks;
}

}  // namespace layerpot
