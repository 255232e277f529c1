#pragma once

#include <vector>

#include "optomech/fock.hpp"

namespace optomech {

/// Lower-sideband readout pulse. Rates in rad/s, duration in seconds.
struct PulseParams {
  double g0 = 0.0;
  double n_cav = 0.0;
  double kappa = 1.0;
  double t_pulse = 0.0;
  double eta = 1.0;

  /// Enhanced coupling g = g0 sqrt(n_cav).
  double coupling() const;
  /// Beamsplitter rate g~ = 2 g^2 / kappa.
  double swap_rate() const;
};

/// Throws RegimeError unless g <= kappa/10 and t_pulse >= 10/kappa (a zero
/// duration is accepted as "no pulse").
void validate(const PulseParams& p);

/// theta = arccos(exp(-g~ t_pulse)).
double theta_from_pulse(const PulseParams& p);

struct HeraldedResult {
  DensityMatrix state;
  double probability = 0.0;
  int m = 0;
  double theta = 0.0;
  double eta = 1.0;
};

/// Mechanical state mixed with optical vacuum on a beamsplitter of angle
/// theta: A_out = cos(theta) A_in + i sin(theta) b, b -> cos(theta) b + i sin(theta) A_in.
///
/// The unitary exp(i theta (a^dag b + a b^dag)) is summed as a power series
/// on each mechanical Fock column. Throws CutoffError when more than
/// kTol.tail_population would be scattered beyond the optical cutoff.
TwoModeState beamsplitter_two_mode(const DensityMatrix& rho_m, double theta, int dim_o = 25);

/// Conditional mechanical state after m clicks on a number-resolving
/// detector behind a loss of transmissivity eta.
///
/// Uses the Kraus form M_n = sin^n(theta)/sqrt(n!) cos(theta)^{b^dag b} b^n
/// (global phases dropped) with binomial thinning of the n scattered photons.
HeraldedResult herald(const DensityMatrix& rho_m, double theta, double eta, int m);

enum class LossOrdering { kLossThenCount, kDephaseThenLoss };

/// Brute-force reference for `herald`: two-mode beamsplitter, optical loss,
/// projection on |m><m| and partial trace.
HeraldedResult herald_oracle(const DensityMatrix& rho_m, double theta, double eta, int m,
                             int dim_o = 25, LossOrdering ordering = LossOrdering::kLossThenCount);

/// Click-number distribution P(m), m = 0..dim-1, without building states.
std::vector<double> click_distribution(const DensityMatrix& rho_m, double theta, double eta);

/// Heralded events per second at a repetition period in seconds.
double event_rate(double probability, double rep_period);

}  // namespace optomech
