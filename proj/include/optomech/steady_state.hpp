#pragma once

#include <Eigen/Dense>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"

namespace optomech {

/// Two-tone (reservoir-engineering) drive in the resolved-sideband RWA.
/// Rates in rad/s; n_th is the mechanical bath occupancy.
struct SqueezeDriveParams {
  double g_minus = 0.0;
  double g_plus = 0.0;
  double kappa = 1.0;
  double gamma_m = 1.0;
  double n_th = 0.0;

  double cooperativity() const { return 4.0 * g_minus * g_minus / (kappa * gamma_m); }
};

/// Throws InvalidArgument or RegimeError when the drive is outside the
/// stable weak-coupling regime.
void validate(const SqueezeDriveParams& p);

/// Drive realizing tanh r = g_plus/g_minus at cooperativity C, with
/// gamma_m = 1 and kappa = kappa_over_gamma.
SqueezeDriveParams drive_for(double r, double cooperativity, double n_th, double kappa_over_gamma);

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

/// Linear Langevin system d<v>/dt = A <v> over (X_a, P_a, X1, X2).
template <typename Scalar>
struct LangevinSystem {
  Matrix4<Scalar> drift;
  Matrix4<Scalar> diffusion;
};

/// Builds A and D from the RWA beamsplitter + two-mode-squeezing Hamiltonian
/// H = g-(a^dag b + a b^dag) + g+(a^dag b^dag + a b), with vacuum cavity input
/// and a thermal mechanical bath. Throws InstabilityError if A is not Hurwitz.
LangevinSystem<double> drift_and_diffusion(const SqueezeDriveParams& p);

/// Solves A V + V A^T + D = 0 through the 16x16 vectorized system.
template <typename Scalar>
Matrix4<Scalar> solve_lyapunov(const Matrix4<Scalar>& a, const Matrix4<Scalar>& d) {
  using Matrix16 = Eigen::Matrix<Scalar, 16, 16>;
  using Vector16 = Eigen::Matrix<Scalar, 16, 1>;
  const Matrix4<Scalar> id = Matrix4<Scalar>::Identity();
  Matrix16 op;
  // column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) op.template block<4, 4>(4 * i, 4 * j) = id(i, j) * a + a(i, j) * id;
  const Vector16 rhs = -Eigen::Map<const Vector16>(d.data());
  const Vector16 v = op.fullPivLu().solve(rhs);
  Matrix4<Scalar> out = Eigen::Map<const Matrix4<Scalar>>(v.data());
  return Scalar(0.5) * (out + out.transpose());
}

template <typename Scalar>
Scalar lyapunov_residual(const Matrix4<Scalar>& a, const Matrix4<Scalar>& v, const Matrix4<Scalar>& d) {
  return (a * v + v * a.transpose() + d).norm();
}

/// Symmetric 4x4 quadrature covariance (vacuum variance 1/2), validated on
/// construction for symmetry and the uncertainty principle.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Matrix4<double>& v);

  const Matrix4<double>& matrix() const { return v_; }
  double var_x1() const { return v_(2, 2); }
  double var_x2() const { return v_(3, 3); }
  double mechanical_offdiagonal() const { return v_(2, 3); }

  /// n_eff = sqrt(<dX1^2><dX2^2>) - 1/2.
  double n_eff() const;
  /// r = ln(<dX2^2>/<dX1^2>) / 4.
  double squeezing() const;

 private:
  Matrix4<double> v_;
};

CovarianceMatrix solve_steady_covariance(const SqueezeDriveParams& p);

/// Steady-state n_eff at squeezing r and cooperativity C.
double purity_tradeoff(double r, double cooperativity, double n_th, double kappa_over_gamma);

}  // namespace optomech
