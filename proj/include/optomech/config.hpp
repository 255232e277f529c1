#pragma once

namespace optomech {

/// Numerical tolerances shared by every module. All thresholds live here.
struct Tolerances {
  // DensityMatrix invariants
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double psd = 1e-9;
  int tail_levels = 5;
  double tail_population = 1e-8;

  // fock_core
  double unitarity_defect = 1e-8;
  double thermal_trace_deficit = 1e-8;
  double max_squeezing = 3.0;

  // steady_state
  double lyapunov_residual = 1e-10;
  double covariance_symmetry = 1e-12;
  double heisenberg = 1e-9;
  double weak_coupling_ratio = 0.1;  // g_minus <= ratio * kappa

  // subtraction
  double min_probability = 1e-300;
  double pulse_min_kappa_t = 10.0;  // t_pulse >= 10 / kappa
  double two_mode_unitarity = 1e-9;

  // measures
  double wigner_boundary = 1e-7;
  double wigner_imaginary = 1e-10;
  double wigner_normalization = 5e-4;
  double wigner_bound_slack = 1e-6;
  double negativity_floor = -1e-4;
  double refinement_relative = 0.01;
};

inline constexpr Tolerances kTol{};

}  // namespace optomech
