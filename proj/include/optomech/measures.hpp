#pragma once

#include "optomech/fock.hpp"

namespace optomech {

/// Rectangular phase-space window in dimensionless quadratures (vacuum
/// variance 1/2).
struct GridSpec {
  double x_min = -5.0;
  double x_max = 5.0;
  double p_min = -5.0;
  double p_max = 5.0;
  int nx = 512;
  int np = 512;

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  double x(int i) const;
  double p(int j) const;

  /// Same window with the spacing halved on both axes.
  GridSpec refined() const;
  static GridSpec square(double half_width, int points);
};

/// W(x_i, p_j) sampled on a GridSpec, values(i, j).
class WignerGrid {
 public:
  WignerGrid(GridSpec spec, RealMatrix values);

  const GridSpec& spec() const { return spec_; }
  const RealMatrix& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  double integral() const;
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }
  double boundary_max() const;

 private:
  GridSpec spec_;
  RealMatrix values_;
};

/// Evaluates the Wigner function from the Fock-basis kernels, summing the
/// normalized Laguerre recurrence once per distinct radius.
///
/// Throws GridError when |W| on the boundary exceeds kTol.wigner_boundary or
/// the sampled function violates normalization or the 1/pi bound.
WignerGrid wigner(const DensityMatrix& rho, const GridSpec& spec);

enum class LaplacianScheme {
  /// FFT differentiation; the default, exact for band-limited grids.
  kSpectral,
  /// 4th-order central differences with one-sided edge closure.
  kFourthOrder,
};

/// Lee-Jeong macroscopicity -(pi/2) int W (d2x + d2p + 2) W.
double macroscopicity(const WignerGrid& grid, LaplacianScheme scheme = LaplacianScheme::kSpectral);

/// Raw (1/2)(int |W| - 1), before clipping. The integral of |W| runs over
/// the band-limited interpolant on a lattice `subsample` times finer, which
/// keeps the kinks of |W| on its nodal lines from dominating the error.
double negativity_raw(const WignerGrid& grid, int subsample = 4);

/// Wigner negativity clipped at zero; throws ConvergenceError when the raw
/// value is below kTol.negativity_floor.
double negativity(const WignerGrid& grid, int subsample = 4);

/// Grid window covering the state: half-width max(5 sqrt(<n>+1), 6 sigma)
/// plus the displacement, where sigma is the largest quadrature spread.
GridSpec auto_grid(const DensityMatrix& rho, int points = 512);

struct NonclassicalityReport {
  double macroscopicity = 0.0;
  double negativity = 0.0;
  double mean_n = 0.0;
  GridSpec grid;
  /// |value(refined) - value(base)|
  double macroscopicity_delta = 0.0;
  double negativity_delta = 0.0;
};

struct ReportOptions {
  int points = 512;
  bool refine = true;
  LaplacianScheme scheme = LaplacianScheme::kSpectral;
};

/// I, N and <n> on an auto-selected grid, refined once. Reported values come
/// from the refined grid; ConvergenceError if the refinement moves I or N by
/// more than 1% (plus an absolute floor of 1e-4).
NonclassicalityReport report(const DensityMatrix& rho, const ReportOptions& options = {});

}  // namespace optomech
