#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "optomech/fock.hpp"


TEST_SUITE_BEGIN("fock_core");
using namespace optomech;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("ladder and number operators are exact") {
  const int d = 12;
  const ComplexMatrix b = annihilation(d).matrix();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double expected = j == i + 1 ? std::sqrt(static_cast<double>(j)) : 0.0;
      CHECK(b(i, j) == Complex(expected, 0.0));
    }
  }
  const ComplexMatrix n = number_operator(d).matrix();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) CHECK(n(i, j) == Complex(i == j ? i : 0.0, 0.0));
  CHECK(max_abs(creation(d).matrix() - b.adjoint()) == 0.0);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix bad = ComplexMatrix::Zero(3, 3);
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvalidArgument);  // trace
  bad(0, 0) = 1.0;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvalidArgument);  // not Hermitian
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, InvalidArgument);  // not PSD
  CHECK(fock_state(2, 5).population(2) == 1.0);
  CHECK_THROWS(fock_state(5, 5));
}

TEST_CASE("squeeze operator") {
  SUBCASE("zero squeezing is the identity") {
    CHECK(max_abs(squeeze_operator(0.0, 20).matrix() - ComplexMatrix::Identity(20, 20)) == 0.0);
  }
  SUBCASE("squeezed vacuum mean number and parity") {
    const DensityMatrix sv = squeezed_thermal_state(1.0, 0.0, 160);
    CHECK(mean_number(sv) == doctest::Approx(std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-9));
    for (int n = 1; n < sv.dim(); n += 2) CHECK(sv.population(n) <= 1e-12);
    // The same through a direct product S|0> on a larger space.
    const ComplexMatrix s = squeeze_operator(1.0, 120).matrix();
    for (int n = 1; n < 60; n += 2) CHECK(std::norm(s(n, 0)) <= 1e-12);
  }
  SUBCASE("agrees with a Pade exponential") {
    const int d = 80;
    const ComplexMatrix b = oracle::lowering(d);
    const ComplexMatrix gen = 0.5 * 0.7 * (b * b - b.adjoint() * b.adjoint());
    const ComplexMatrix ref = gen.exp();
    const ComplexMatrix s = squeeze_operator(0.7, d).matrix();
    CHECK(max_abs((s - ref).topLeftCorner(d / 2, d / 2)) < 1e-10);
  }
  SUBCASE("S(r) S(-r) is the identity on the lower half") {
    for (double r : {0.3, 1.0, 1.5}) {
      const int d = r > 1.2 ? 240 : 120;
      const ComplexMatrix prod = squeeze_operator(r, d).matrix() * squeeze_operator(-r, d).matrix();
      CHECK(max_abs((prod - ComplexMatrix::Identity(d, d)).topLeftCorner(d / 2, d / 2)) < 1e-8);
    }
  }
  SUBCASE("domain and cutoff errors") {
    CHECK_THROWS_AS(squeeze_operator(0.5, 1), InvalidArgument);
    CHECK_THROWS_AS(squeeze_operator(3.5, 200), InvalidArgument);
    CHECK_THROWS_AS(squeeze_operator(2.0, 20), CutoffError);
  }
}

TEST_CASE("thermal states") {
  const DensityMatrix vac = thermal_state(0.0, 10);
  CHECK(vac.population(0) == doctest::Approx(1.0));
  const DensityMatrix t2 = thermal_state(2.0, 200);
  CHECK(t2.population(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(t2.population(1) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(mean_number(t2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(thermal_state(0.02, 40).purity() == doctest::Approx(1.0 / 1.04).epsilon(1e-12));
  CHECK_THROWS_AS(thermal_state(2.0, 20), CutoffError);
  CHECK_THROWS_AS(thermal_state(-0.1, 20), InvalidArgument);
}

TEST_CASE("squeezed thermal variances") {
  SUBCASE("pure squeezing") {
    const auto [v1, v2] = quadrature_variances(squeezed_thermal_state(0.5, 0.0, 60));
    CHECK(v1 == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-9));
    CHECK(v2 == doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-9));
  }
  SUBCASE("vacuum") {
    const auto [v1, v2] = quadrature_variances(squeezed_thermal_state(0.0, 0.0, 10));
    CHECK(v1 == doctest::Approx(0.5));
    CHECK(v2 == doctest::Approx(0.5));
  }
  SUBCASE("purity relation") {
    for (double r : {0.3, 1.0, 1.2}) {
      for (double n : {0.02, 0.1}) {
        const auto [v1, v2] = quadrature_variances(squeezed_thermal_state(r, n, 120));
        CHECK(std::abs(v1 - (n + 0.5) * std::exp(-2 * r)) < 1e-6);
        CHECK(std::abs(v2 - (n + 0.5) * std::exp(2 * r)) < 1e-6);
      }
    }
    const auto [v1, v2] = quadrature_variances(squeezed_thermal_state(1.0, 0.02, 160));
    CHECK(std::sqrt(v1 * v2) == doctest::Approx(0.52).epsilon(1e-9));
  }
  SUBCASE("cutoff doubling moves scalars by less than 1e-6") {
    for (double r : {0.5, 1.0}) {
      const DensityMatrix a = squeezed_thermal_state(r, 0.02, 80);
      const DensityMatrix b = squeezed_thermal_state(r, 0.02, 160);
      CHECK(std::abs(mean_number(a) - mean_number(b)) < 1e-6);
      CHECK(std::abs(a.purity() - b.purity()) < 1e-6);
      CHECK(std::abs(quadrature_variances(a).first - quadrature_variances(b).first) < 1e-6);
      CHECK(std::abs(quadrature_variances(a).second - quadrature_variances(b).second) < 1e-6);
    }
  }
}

TEST_CASE("loss channel") {
  const DensityMatrix f1 = fock_state(1, 6);
  const DensityMatrix out = loss_channel(f1, 0.2);
  CHECK(out.population(0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(out.population(1) == doctest::Approx(0.2).epsilon(1e-12));

  const DensityMatrix t2 = thermal_state(2.0, 200);
  CHECK(max_abs(loss_channel(t2, 1.0).matrix() - t2.matrix()) == 0.0);
  CHECK(loss_channel(t2, 0.0).population(0) == doctest::Approx(1.0).epsilon(1e-12));
  // Thermal in, thermal out with occupancy eta * n.
  const DensityMatrix t_out = loss_channel(thermal_state(1.0, 120), 0.3);
  const DensityMatrix t_ref = thermal_state(0.3, 120);
  CHECK(max_abs(t_out.matrix() - t_ref.matrix()) < 1e-9);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = oracle::random_state(rng, 8, 12);
    const double e1 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double e2 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DensityMatrix twice = loss_channel(loss_channel(rho, e1), e2);
    const DensityMatrix once = loss_channel(rho, e1 * e2);
    CHECK(max_abs(twice.matrix() - once.matrix()) < 1e-9);
    CHECK(std::abs(once.matrix().trace().real() - 1.0) < 1e-10);
    // Mean number scales linearly.
    CHECK(mean_number(once) == doctest::Approx(e1 * e2 * mean_number(rho)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(loss_channel(f1, 1.2), InvalidArgument);
}

TEST_CASE("expectations") {
  CHECK(std::abs(expectation(vacuum_state(8), number_operator(8))) == 0.0);
  const DensityMatrix t2 = thermal_state(2.0, 200);
  CHECK(expectation(t2, number_operator(200)).real() == doctest::Approx(2.0).epsilon(1e-9));
  const DensityMatrix sv = squeezed_thermal_state(1.0, 0.0, 160);
  const Complex n = expectation(sv, number_operator(160));
  CHECK(n.real() == doctest::Approx(std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-9));
  CHECK(std::abs(n.imag()) < 1e-10);
  CHECK_THROWS_AS(expectation(sv, number_operator(10)), DimensionError);
}

TEST_CASE("rotation and random-state invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = oracle::random_state(rng, 6, 10);
    const DensityMatrix rot = rotate(rho, 0.4);
    CHECK(max_abs(rot.matrix() - rot.matrix().adjoint()) <= 1e-12);
    CHECK(std::abs(rot.matrix().trace().real() - 1.0) <= 1e-10);
    CHECK(rot.min_eigenvalue() >= -1e-9);
    CHECK(rot.purity() == doctest::Approx(rho.purity()).epsilon(1e-12));
    CHECK(mean_number(rot) == doctest::Approx(mean_number(rho)).epsilon(1e-12));
  }
}

TEST_CASE("two-mode partial traces") {
  std::mt19937_64 rng(3);
  const DensityMatrix a = oracle::random_state(rng, 4, 5);
  const DensityMatrix b = oracle::random_state(rng, 3, 4);
  const TwoModeState ab = TwoModeState::product(a, b);
  CHECK(max_abs(ab.mechanics().matrix() - a.matrix()) < 1e-12);
  CHECK(max_abs(ab.optics().matrix() - b.matrix()) < 1e-12);
  CHECK(ab.index(2, 3) == 2 * 4 + 3);
}

TEST_SUITE_END();
