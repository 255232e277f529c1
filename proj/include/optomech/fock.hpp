#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"

namespace optomech {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Single-mode state on the truncated Fock space |0>..|dim-1>.
///
/// Construction validates hermiticity, unit trace and positivity against
/// kTol; a value of this type is always a physical state.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix elements);

  /// Hermitizes and divides by the trace before validating.
  static DensityMatrix normalized(const ComplexMatrix& elements);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const ComplexMatrix& matrix() const { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

  double population(int n) const { return rho_(n, n).real(); }
  double purity() const;
  double min_eigenvalue() const;

  /// Summed population of the top `levels` Fock states.
  double tail_population(int levels = kTol.tail_levels) const;
  bool converged() const { return tail_population() <= kTol.tail_population; }

  /// Embeds into a larger cutoff (zero padding).
  DensityMatrix padded(int new_dim) const;
  /// Restricts to a smaller cutoff and renormalizes.
  DensityMatrix truncated(int new_dim) const;

 private:
  ComplexMatrix rho_;
};

/// Operator on the truncated single-mode Fock space.
class FockOperator {
 public:
  explicit FockOperator(ComplexMatrix elements);

  int dim() const { return static_cast<int>(op_.rows()); }
  const ComplexMatrix& matrix() const { return op_; }

  FockOperator adjoint() const { return FockOperator(op_.adjoint()); }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);

 private:
  ComplexMatrix op_;
};

FockOperator annihilation(int dim);
FockOperator creation(int dim);
FockOperator number_operator(int dim);
/// X1 = (b + b^dag)/sqrt(2); vacuum variance 1/2.
FockOperator quadrature_x(int dim);
/// X2 = i(b^dag - b)/sqrt(2).
FockOperator quadrature_p(int dim);
/// exp(-i phi b^dag b).
FockOperator phase_rotation(double phi, int dim);

/// exp(r (b^2 - b^dag^2) / 2) on the truncated space.
///
/// Throws InvalidArgument for dim < 2 or |r| > 3, and CutoffError when the
/// result is not unitary on the lower half of the space or when the squeezed
/// vacuum it produces leaks more than kTol.tail_population into the top
/// levels.
FockOperator squeeze_operator(double r, int dim);

DensityMatrix fock_state(int n, int dim);
DensityMatrix vacuum_state(int dim);
DensityMatrix thermal_state(double n_eff, int dim);
DensityMatrix squeezed_thermal_state(double r, double n_eff, int dim);

/// Pure-loss channel with transmissivity eta.
DensityMatrix loss_channel(const DensityMatrix& rho, double eta);

/// U rho U^dag followed by re-validation.
DensityMatrix transform(const DensityMatrix& rho, const FockOperator& unitary);
DensityMatrix rotate(const DensityMatrix& rho, double phi);

Complex expectation(const DensityMatrix& rho, const FockOperator& op);
double mean_number(const DensityMatrix& rho);

/// Quadrature variances (<dX1^2>, <dX2^2>).
std::pair<double, double> quadrature_variances(const DensityMatrix& rho);

/// Two-mode state, mechanics index slowest: |i_m, i_o> -> i_m * dim_o + i_o.
class TwoModeState {
 public:
  TwoModeState(int dim_m, int dim_o, ComplexMatrix elements);

  static TwoModeState product(const DensityMatrix& mech, const DensityMatrix& opt);

  int dim_m() const { return dim_m_; }
  int dim_o() const { return dim_o_; }
  const ComplexMatrix& matrix() const { return rho_; }
  int index(int i_m, int i_o) const { return i_m * dim_o_ + i_o; }

  DensityMatrix mechanics() const;
  DensityMatrix optics() const;

  /// Population of optical levels >= dim_o - levels plus mechanical levels
  /// >= dim_m - levels.
  double tail_population(int levels = kTol.tail_levels) const;

 private:
  int dim_m_;
  int dim_o_;
  ComplexMatrix rho_;
};

/// Pure loss on the optical mode of a two-mode state.
TwoModeState optical_loss(const TwoModeState& state, double eta);

/// Removes optical coherences in the number basis.
TwoModeState optical_dephasing(const TwoModeState& state);

/// Unnormalized <m|rho|m> on the optical mode, as a mechanical matrix.
ComplexMatrix optical_projection(const TwoModeState& state, int m);

}  // namespace optomech
