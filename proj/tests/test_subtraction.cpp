#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "optomech/subtraction.hpp"


TEST_SUITE_BEGIN("subtraction");
using namespace optomech;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("theta from pulse parameters") {
  PulseParams none{0.0, 0.0, 1.0, 0.0, 1.0};
  CHECK(theta_from_pulse(none) == 0.0);

  // g~ t = 0.005
  const double kappa = 1000.0;
  PulseParams p{0.0, 1.0, kappa, 0.05, 1.0};
  p.g0 = std::sqrt(0.005 / p.t_pulse * kappa / 2.0);
  CHECK(p.swap_rate() * p.t_pulse == doctest::Approx(0.005));
  const double theta = theta_from_pulse(p);
  CHECK(theta == doctest::Approx(std::acos(std::exp(-0.005))).epsilon(1e-14));
  CHECK(theta == doctest::Approx(0.0999).epsilon(1e-3));
  CHECK(std::sin(theta) * std::sin(theta) == doctest::Approx(0.01).epsilon(0.01));

  // Device numbers: 10 ns pulse, g0/2pi = 1 MHz, kappa/2pi = 1 GHz.
  const double two_pi = 2.0 * std::numbers::pi;
  PulseParams device{two_pi * 1e6, 0.0, two_pi * 1e9, 10e-9, 0.2};
  for (double n_cav : {10.0, 40.0, 80.0}) {
    device.n_cav = n_cav;
    const double t = theta_from_pulse(device);
    CHECK(t >= 0.05);
    CHECK(t <= 0.15);
  }

  PulseParams strong = device;
  strong.n_cav = 1e5;  // g = 316 MHz > kappa/10
  CHECK_THROWS_AS(theta_from_pulse(strong), RegimeError);
  PulseParams short_pulse = device;
  short_pulse.t_pulse = 1e-10;
  CHECK_THROWS_AS(theta_from_pulse(short_pulse), RegimeError);
}

TEST_CASE("beamsplitter on two modes") {
  SUBCASE("theta = 0 leaves the state unchanged") {
    const DensityMatrix rho = squeezed_thermal_state(0.5, 0.02, 30);
    const TwoModeState out = beamsplitter_two_mode(rho, 0.0, 5);
    CHECK(max_abs(out.mechanics().matrix() - rho.matrix()) < 1e-12);
    CHECK(out.optics().population(0) == doctest::Approx(1.0));
  }
  SUBCASE("50/50 on a single quantum") {
    const TwoModeState out = beamsplitter_two_mode(fock_state(1, 4), std::numbers::pi / 4, 4);
    CHECK(out.optics().population(1) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("optical mean number is sin^2 theta times the mechanical one") {
    const DensityMatrix sv = squeezed_thermal_state(0.5, 0.0, 60);
    const TwoModeState out = beamsplitter_two_mode(sv, 0.1, 12);
    CHECK(mean_number(out.optics()) ==
          doctest::Approx(std::sin(0.1) * std::sin(0.1) * mean_number(sv)).epsilon(1e-9));
  }
  SUBCASE("amplitude relations of the mode transformation") {
    // <A_out> = i sin(theta) <b_in> and <b_out> = cos(theta) <b_in> for a coherent-like input.
    ComplexMatrix psi = ComplexMatrix::Zero(6, 6);
    psi(0, 0) = 0.5;
    psi(1, 1) = 0.5;
    psi(0, 1) = 0.5;
    psi(1, 0) = 0.5;
    const DensityMatrix rho{psi};
    const double theta = 0.3;
    const TwoModeState out = beamsplitter_two_mode(rho, theta, 4);
    const Complex b_in = expectation(rho, annihilation(6));
    const Complex b_out = expectation(out.mechanics(), annihilation(6));
    const Complex a_out = expectation(out.optics(), annihilation(4));
    CHECK(std::abs(b_out - std::cos(theta) * b_in) < 1e-12);
    CHECK(std::abs(a_out - Complex(0, std::sin(theta)) * b_in) < 1e-12);
  }
  SUBCASE("optical cutoff too small") {
    CHECK_THROWS_AS(beamsplitter_two_mode(thermal_state(2.0, 60), 1.2, 3), CutoffError);
  }
}

TEST_CASE("herald examples") {
  const DensityMatrix sv = squeezed_thermal_state(1.0, 0.0, 80);
  SUBCASE("theta = 0, m = 0 is certain and leaves the state") {
    const HeraldedResult h = herald(sv, 0.0, 1.0, 0);
    CHECK(h.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(h.state.matrix() - sv.matrix()) < 1e-12);
  }
  SUBCASE("no detector, no clicks") {
    CHECK_THROWS_AS(herald(sv, 0.1, 0.0, 1), ZeroProbabilityError);
  }
  SUBCASE("P(1) by direct sum") {
    const double t = 0.1;
    double expected = 0.0;
    for (int n = 1; n < sv.dim(); ++n) {
      expected += n * std::pow(std::sin(t), 2) * std::pow(std::cos(t), 2 * (n - 1)) * sv.population(n);
    }
    CHECK(herald(sv, t, 1.0, 1).probability == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("m = 0 probability on a thermal state") {
    const DensityMatrix th = thermal_state(1.0, 80);
    double expected = 0.0;
    for (int n = 0; n < th.dim(); ++n) expected += std::pow(std::cos(0.1), 2 * n) * th.population(n);
    CHECK(herald_oracle(th, 0.1, 1.0, 0, 10).probability == doctest::Approx(expected).epsilon(1e-10));
    CHECK(herald(th, 0.1, 1.0, 0).probability == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("theta = 0 projects onto zero clicks") {
    CHECK(herald_oracle(squeezed_thermal_state(0.5, 0.02, 30), 0.0, 1.0, 0, 5).probability ==
          doctest::Approx(1.0));
  }
  SUBCASE("window of heralding probabilities at eta = 0.2") {
    const double p = herald(squeezed_thermal_state(0.5, 0.02, 80), 0.05, 0.2, 1).probability;
    CHECK(p >= 1e-7);
    CHECK(p <= 1e-3);
  }
  SUBCASE("pure output from pure input at eta = 1") {
    // One-phonon-subtracted squeezed vacuum is a squeezed single phonon with
    // tanh r' = cos^2(theta) tanh r.
    const double theta = 0.1;
    const HeraldedResult h = herald(sv, theta, 1.0, 1);
    CHECK(h.state.purity() == doctest::Approx(1.0).epsilon(1e-10));
    const double r_eff = std::atanh(std::cos(theta) * std::cos(theta) * std::tanh(1.0));
    const DensityMatrix ref = transform(fock_state(1, 120), squeeze_operator(r_eff, 120)).truncated(80);
    const double overlap = (h.state.matrix() * ref.matrix()).trace().real();
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(herald(sv, 0.1, 1.0, -1), InvalidArgument);
  CHECK_THROWS_AS(herald(sv, 2.0, 1.0, 1), InvalidArgument);
}

TEST_CASE("herald agrees with the two-mode construction on random tuples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(0.0, 1.2), un(0.0, 0.2), ut(0.0, 0.15);
  const double etas[] = {0.1, 0.2, 0.5, 1.0};
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double r = ur(rng), n = un(rng), t = ut(rng);
    const double eta = etas[trial % 4];
    const int m = trial % 4;
    // dim_m = 30 truncates the larger squeezings; both routes see the same input.
    const DensityMatrix rho = squeezed_thermal_state(r, n, 120).truncated(30);
    try {
      const HeraldedResult a = herald(rho, t, eta, m);
      const HeraldedResult b = herald_oracle(rho, t, eta, m, 10);
      CHECK(max_abs(a.state.matrix() - b.state.matrix()) < 1e-8);
      CHECK(std::abs(a.probability - b.probability) <= 1e-10 * b.probability);
      ++checked;
    } catch (const ZeroProbabilityError&) {
      CHECK(t == 0.0);
    }
  }
  CHECK(checked >= 18);
}

TEST_CASE("loss ordering is irrelevant for photon counting") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = oracle::random_state(rng, 10, 20);
    const double eta = 0.3 + 0.1 * trial;
    for (int m : {0, 1, 2}) {
      const HeraldedResult a = herald_oracle(rho, 0.12, eta, m, 10, LossOrdering::kLossThenCount);
      const HeraldedResult b = herald_oracle(rho, 0.12, eta, m, 10, LossOrdering::kDephaseThenLoss);
      CHECK(max_abs(a.state.matrix() - b.state.matrix()) < 1e-9);
      CHECK(std::abs(a.probability - b.probability) < 1e-9);
    }
  }
}

TEST_CASE("click distribution") {
  const DensityMatrix rho = squeezed_thermal_state(0.8, 0.05, 80);
  for (double theta : {0.05, 0.3, 1.0}) {
    const auto dist = click_distribution(rho, theta, 1.0);
    double total = 0.0;
    for (double p : dist) total += p;
    CHECK(std::abs(total - 1.0) < 1e-8);
    for (int m = 0; m < 4; ++m) CHECK(dist[m] == doctest::Approx(herald(rho, theta, 1.0, m).probability).epsilon(1e-10));
  }
  // Completeness with an optical cutoff of 25 levels.
  const DensityMatrix sv = squeezed_thermal_state(1.0, 0.02, 80);
  double total = 0.0;
  for (int m = 0; m < 25; ++m) total += herald(sv, 0.15, 1.0, m).probability;
  CHECK(std::abs(total - 1.0) < 1e-8);
}

TEST_CASE("parity selection") {
  const DensityMatrix sv = squeezed_thermal_state(1.0, 0.0, 80);
  for (int m : {1, 2, 3}) {
    const HeraldedResult h = herald(sv, 0.1, 1.0, m);
    double wrong = 0.0;
    for (int n = (m + 1) % 2; n < h.state.dim(); n += 2) wrong += h.state.population(n);
    CHECK(wrong < 1e-10);
  }
}

TEST_CASE("P(m) scales as theta^(2m)") {
  const DensityMatrix rho = squeezed_thermal_state(0.8, 0.02, 80);
  for (int m : {1, 2, 3}) {
    const double lo = herald(rho, 0.01, 1.0, m).probability;
    const double hi = herald(rho, 0.05, 1.0, m).probability;
    const double slope = std::log(hi / lo) / std::log(5.0);
    CHECK(std::abs(slope - 2.0 * m) < 0.05);
  }
}

TEST_CASE("event rate") {
  CHECK(event_rate(1e-7, 10e-6) == doctest::Approx(0.01));
  CHECK(event_rate(0.0, 10e-6) == 0.0);
  CHECK(event_rate(1e-4, 10e-6) == doctest::Approx(10.0));
  CHECK_THROWS_AS(event_rate(1e-4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(event_rate(1.5, 1.0), InvalidArgument);
}

TEST_SUITE_END();
