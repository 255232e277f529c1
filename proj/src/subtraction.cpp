#include "optomech/subtraction.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace optomech {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// p^k (1-p)^(n-k) C(n,k), exact at the p = 0 and p = 1 endpoints.
double binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_binomial(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

void check_angle(double theta) {
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2)) {
    throw InvalidArgument("theta must lie in [0, pi/2)");
  }
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0, 1]");
}

}  // namespace

double PulseParams::coupling() const { return g0 * std::sqrt(n_cav); }

double PulseParams::swap_rate() const {
  const double g = coupling();
  return 2.0 * g * g / kappa;
}

void validate(const PulseParams& p) {
  if (!(p.kappa > 0.0)) throw InvalidArgument("PulseParams: kappa must be positive");
  if (!(p.g0 >= 0.0) || !(p.n_cav >= 0.0) || !(p.t_pulse >= 0.0)) {
    throw InvalidArgument("PulseParams: g0, n_cav and t_pulse must be non-negative");
  }
  check_eta(p.eta);
  if (p.coupling() > kTol.weak_coupling_ratio * p.kappa) {
    throw RegimeError("PulseParams: g = g0 sqrt(n_cav) exceeds kappa/10");
  }
  if (p.t_pulse > 0.0 && p.t_pulse * p.kappa < kTol.pulse_min_kappa_t) {
    throw RegimeError("PulseParams: pulse shorter than 10/kappa breaks adiabatic elimination");
  }
}

double theta_from_pulse(const PulseParams& p) {
  validate(p);
  return std::acos(std::exp(-p.swap_rate() * p.t_pulse));
}

TwoModeState beamsplitter_two_mode(const DensityMatrix& rho_m, double theta, int dim_o) {
  check_angle(theta);
  if (dim_o < 2) throw DimensionError("beamsplitter_two_mode: optical cutoff must be at least 2");
  const int dm = rho_m.dim();
  const int size = dm * dim_o;
  const auto index = [dim_o](int i_m, int i_o) { return i_m * dim_o + i_o; };

  // Population scattered past the optical cutoff: binomial tail in sin^2.
  const double s2 = std::sin(theta) * std::sin(theta);
  double overflow = 0.0;
  for (int n = dim_o; n < dm; ++n) {
    double tail = 0.0;
    for (int k = dim_o; k <= n; ++k) tail += binomial_pmf(n, k, s2);
    overflow += tail * rho_m.population(n);
  }
  if (overflow > kTol.tail_population) {
    throw CutoffError("beamsplitter_two_mode: optical cutoff " + std::to_string(dim_o) +
                      " loses population " + std::to_string(overflow));
  }

  // G = a^dag b + a b^dag has non-negative entries, so the terms
  // theta^j G^j / j! |n,0> are accumulated without cancellation and the
  // i^j phases are applied afterwards.
  const auto apply_generator = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
    for (int a = 0; a < dm; ++a) {
      for (int o = 0; o < dim_o; ++o) {
        const double x = v(index(a, o));
        if (x == 0.0) continue;
        // a^dag b: |a, o> -> sqrt(a) sqrt(o+1) |a-1, o+1>
        if (a > 0 && o + 1 < dim_o) out(index(a - 1, o + 1)) += std::sqrt(a * (o + 1.0)) * x;
        // a b^dag: |a, o> -> sqrt(a+1) sqrt(o) |a+1, o-1>
        if (o > 0 && a + 1 < dm) out(index(a + 1, o - 1)) += std::sqrt((a + 1.0) * o) * x;
      }
    }
    return out;
  };

  ComplexMatrix isometry = ComplexMatrix::Zero(size, dm);
  const Complex phase_step(0.0, 1.0);
  for (int n = 0; n < dm; ++n) {
    Eigen::VectorXd term = Eigen::VectorXd::Zero(size);
    term(index(n, 0)) = 1.0;
    Complex phase = 1.0;
    Eigen::VectorXcd column = term.cast<Complex>();
    for (int j = 1; j < 400; ++j) {
      term = apply_generator(term) * (theta / j);
      phase *= phase_step;
      column += phase * term.cast<Complex>();
      if (term.lpNorm<Eigen::Infinity>() < 1e-300 ||
          (j > 2 && term.lpNorm<Eigen::Infinity>() < 1e-20 * column.lpNorm<Eigen::Infinity>())) {
        break;
      }
    }
    isometry.col(n) = column;
  }

  const double defect =
      (isometry.adjoint() * isometry - ComplexMatrix::Identity(dm, dm)).cwiseAbs().maxCoeff();
  if (defect > kTol.two_mode_unitarity) {
    throw CutoffError("beamsplitter_two_mode: unitarity defect " + std::to_string(defect));
  }

  ComplexMatrix out = isometry * rho_m.matrix() * isometry.adjoint();
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  return TwoModeState(dm, dim_o, std::move(out));
}

HeraldedResult herald(const DensityMatrix& rho_m, double theta, double eta, int m) {
  check_angle(theta);
  check_eta(eta);
  if (m < 0) throw InvalidArgument("herald: click number must be non-negative");
  const int dim = rho_m.dim();
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const ComplexMatrix& in = rho_m.matrix();

  // coeff(k, n) = <k| M_n |k+n> = sqrt(C(k+n, n)) sin^n cos^k
  RealMatrix coeff = RealMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int k = 0; k + n < dim; ++k) {
      const double log_mag = 0.5 * log_binomial(k + n, n);
      const double sn = n == 0 ? 1.0 : std::pow(s, n);
      const double ck = k == 0 ? 1.0 : std::pow(c, k);
      coeff(k, n) = std::exp(log_mag) * sn * ck;
    }
  }

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int n = m; n < dim; ++n) {
    const double w = binomial_pmf(n, m, eta);
    if (w == 0.0) continue;
    for (int k = 0; k + n < dim; ++k)
      for (int l = 0; l + n < dim; ++l) out(k, l) += w * coeff(k, n) * coeff(l, n) * in(k + n, l + n);
  }

  const double probability = out.trace().real();
  if (!(probability >= kTol.min_probability)) {
    throw ZeroProbabilityError("herald: outcome m=" + std::to_string(m) + " has zero probability");
  }
  return HeraldedResult{DensityMatrix::normalized(out / probability), probability, m, theta, eta};
}

HeraldedResult herald_oracle(const DensityMatrix& rho_m, double theta, double eta, int m, int dim_o,
                             LossOrdering ordering) {
  check_eta(eta);
  if (m < 0) throw InvalidArgument("herald_oracle: click number must be non-negative");
  if (m >= dim_o) throw DimensionError("herald_oracle: click number outside optical cutoff");
  TwoModeState two = beamsplitter_two_mode(rho_m, theta, dim_o);
  if (ordering == LossOrdering::kDephaseThenLoss) two = optical_dephasing(two);
  two = optical_loss(two, eta);
  const ComplexMatrix projected = optical_projection(two, m);
  const double probability = projected.trace().real();
  if (!(probability >= kTol.min_probability)) {
    throw ZeroProbabilityError("herald_oracle: outcome m=" + std::to_string(m) +
                               " has zero probability");
  }
  return HeraldedResult{DensityMatrix::normalized(projected / probability), probability, m, theta,
                        eta};
}

std::vector<double> click_distribution(const DensityMatrix& rho_m, double theta, double eta) {
  check_angle(theta);
  check_eta(eta);
  // Scattering and detection are successive binomial thinnings.
  const double p = eta * std::sin(theta) * std::sin(theta);
  std::vector<double> dist(rho_m.dim(), 0.0);
  for (int n = 0; n < rho_m.dim(); ++n) {
    const double pop = rho_m.population(n);
    for (int m = 0; m <= n; ++m) dist[m] += binomial_pmf(n, m, p) * pop;
  }
  return dist;
}

double event_rate(double probability, double rep_period) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvalidArgument("event_rate: probability outside [0, 1]");
  }
  if (!(rep_period > 0.0)) throw InvalidArgument("event_rate: repetition period must be positive");
  return probability / rep_period;
}

}  // namespace optomech
