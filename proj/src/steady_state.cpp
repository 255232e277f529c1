#include "optomech/steady_state.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>

namespace optomech {

void validate(const SqueezeDriveParams& p) {
  if (!(p.kappa > 0.0) || !(p.gamma_m > 0.0)) {
    throw InvalidArgument("SqueezeDriveParams: kappa and gamma_m must be positive");
  }
  if (!(p.n_th >= 0.0)) throw InvalidArgument("SqueezeDriveParams: n_th must be non-negative");
  if (!(p.g_plus >= 0.0) || !(p.g_minus >= 0.0)) {
    throw InvalidArgument("SqueezeDriveParams: drive rates must be non-negative");
  }
  const bool undriven = p.g_minus == 0.0 && p.g_plus == 0.0;
  if (!undriven && !(p.g_plus < p.g_minus)) {
    throw InvalidArgument("SqueezeDriveParams: dissipative squeezing requires g_plus < g_minus");
  }
  if (p.g_minus > kTol.weak_coupling_ratio * p.kappa) {
    throw RegimeError("SqueezeDriveParams: g_minus = " + std::to_string(p.g_minus / p.kappa) +
                      " kappa exceeds the weak-coupling limit kappa/10");
  }
}

SqueezeDriveParams drive_for(double r, double cooperativity, double n_th, double kappa_over_gamma) {
  if (!(r >= 0.0)) throw InvalidArgument("drive_for: r must be non-negative");
  if (!(cooperativity > 0.0)) throw InvalidArgument("drive_for: cooperativity must be positive");
  SqueezeDriveParams p;
  p.gamma_m = 1.0;
  p.kappa = kappa_over_gamma;
  p.n_th = n_th;
  p.g_minus = std::sqrt(cooperativity * p.kappa * p.gamma_m / 4.0);
  p.g_plus = p.g_minus * std::tanh(r);
  return p;
}

LangevinSystem<double> drift_and_diffusion(const SqueezeDriveParams& p) {
  validate(p);
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const double gm = p.g_minus;
  const double gp = p.g_plus;

  // Heisenberg-Langevin drift over the mode vector (a, a^dag, b, b^dag).
  Eigen::Matrix4cd modes = Eigen::Matrix4cd::Zero();
  modes(0, 0) = -p.kappa / 2.0;
  modes(0, 2) = -i * gm;
  modes(0, 3) = -i * gp;
  modes(1, 1) = -p.kappa / 2.0;
  modes(1, 3) = i * gm;
  modes(1, 2) = i * gp;
  modes(2, 2) = -p.gamma_m / 2.0;
  modes(2, 0) = -i * gm;
  modes(2, 1) = -i * gp;
  modes(3, 3) = -p.gamma_m / 2.0;
  modes(3, 1) = i * gm;
  modes(3, 0) = i * gp;

  // X = (c + c^dag)/sqrt2, P = -i(c - c^dag)/sqrt2 for each mode.
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd to_quad = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 2; ++k) {
    to_quad(2 * k, 2 * k) = s;
    to_quad(2 * k, 2 * k + 1) = s;
    to_quad(2 * k + 1, 2 * k) = -i * s;
    to_quad(2 * k + 1, 2 * k + 1) = i * s;
  }
  const Eigen::Matrix4cd drift_c = to_quad * modes * to_quad.inverse();

  LangevinSystem<double> sys;
  sys.drift = drift_c.real();
  sys.diffusion = Matrix4<double>::Zero();
  sys.diffusion(0, 0) = sys.diffusion(1, 1) = p.kappa / 2.0;
  sys.diffusion(2, 2) = sys.diffusion(3, 3) = p.gamma_m * (p.n_th + 0.5);

  Eigen::EigenSolver<Matrix4<double>> es(sys.drift, false);
  for (int k = 0; k < 4; ++k) {
    if (es.eigenvalues()(k).real() >= 0.0) {
      throw InstabilityError("drift matrix has eigenvalue with non-negative real part");
    }
  }
  return sys;
}

CovarianceMatrix::CovarianceMatrix(const Matrix4<double>& v) : v_(v) {
  const double asym = (v_ - v_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kTol.covariance_symmetry * std::max(1.0, v_.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("CovarianceMatrix: not symmetric");
  }
  Eigen::Matrix4cd h = v_.cast<std::complex<double>>();
  const std::complex<double> half_i(0.0, 0.5);
  for (int k = 0; k < 2; ++k) {
    h(2 * k, 2 * k + 1) += half_i;
    h(2 * k + 1, 2 * k) -= half_i;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -kTol.heisenberg) {
    throw InvalidArgument("CovarianceMatrix: violates the uncertainty principle");
  }
}

double CovarianceMatrix::n_eff() const { return std::sqrt(var_x1() * var_x2()) - 0.5; }

double CovarianceMatrix::squeezing() const { return 0.25 * std::log(var_x2() / var_x1()); }

CovarianceMatrix solve_steady_covariance(const SqueezeDriveParams& p) {
  const LangevinSystem<double> sys = drift_and_diffusion(p);
  // Rescale rates by kappa so the 16x16 system is well conditioned.
  const Matrix4<double> a = sys.drift / p.kappa;
  const Matrix4<double> d = sys.diffusion / p.kappa;
  const Matrix4<double> v = solve_lyapunov<double>(a, d);
  const double residual = lyapunov_residual<double>(a, v, d);
  if (residual > kTol.lyapunov_residual * d.norm()) {
    throw ConvergenceError("Lyapunov residual " + std::to_string(residual) + " above tolerance");
  }
  return CovarianceMatrix(v);
}

double purity_tradeoff(double r, double cooperativity, double n_th, double kappa_over_gamma) {
  return solve_steady_covariance(drive_for(r, cooperativity, n_th, kappa_over_gamma)).n_eff();
}

}  // namespace optomech
