#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rotor/observables.hpp"
#include "rotor/propagator.hpp"

using namespace rotor;

namespace {

Wavepacket random_state(std::mt19937_64& rng, int j_max, int j0 = 0) {
  std::normal_distribution<double> g;
  ComplexVector c(j_max + 1);
  for (int j = 0; j <= j_max; ++j) c[j] = Complex(g(rng), g(rng));
  c /= c.norm();
  return Wavepacket(RotorBasis(j_max), c, j0);
}

}  // namespace

TEST(Observables, AgreeWithDenseQuadraticForms) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const auto psi = random_state(rng, 12);
    const auto cos_mat = build_cos_matrix(psi.basis());
    const auto cos2_mat = build_cos2_matrix(psi.basis());
    EXPECT_NEAR(orientation(psi, cos_mat), cos_mat.expectation(psi.coefficients()), 1e-13);
    EXPECT_NEAR(alignment(psi, cos2_mat), cos2_mat.expectation(psi.coefficients()), 1e-13);
    EXPECT_NEAR(kinetic_energy(psi), build_j2_matrix(psi.basis()).expectation(psi.coefficients()),
                1e-12);
  }
}

TEST(Observables, BoundedForNormalizedStates) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 50; ++k) {
    const auto psi = random_state(rng, 8);
    const auto obs = measure(psi);
    EXPECT_LE(std::abs(obs.orientation), 1.0);
    EXPECT_GE(obs.alignment, 0.0);
    EXPECT_LE(obs.alignment, 1.0);
    // <cos>^2 <= <cos^2>.
    EXPECT_LE(obs.orientation * obs.orientation, obs.alignment + 1e-14);
    double total = 0.0;
    for (double p : obs.populations) total += p;
    EXPECT_NEAR(total, 1.0, 1e-13);
    const auto prod = coherence_products(psi, 1);
    for (std::size_t j = 0; j < prod.size(); ++j) {
      EXPECT_LE(prod[j], 0.5 * (obs.populations[j] + obs.populations[j + 1]) + 1e-15);
    }
  }
}

TEST(Observables, InvariantUnderGlobalPhase) {
  std::mt19937_64 rng(13);
  const auto psi = random_state(rng, 10);
  const Wavepacket rotated(psi.basis(), psi.coefficients() * std::polar(1.0, 0.83), 0);
  const auto a = measure(psi);
  const auto b = measure(rotated);
  EXPECT_NEAR(a.orientation, b.orientation, 1e-14);
  EXPECT_NEAR(a.alignment, b.alignment, 1e-14);
  EXPECT_NEAR(a.kinetic_energy, b.kinetic_energy, 1e-13);
}

TEST(Observables, FieldFreeStates) {
  EXPECT_NEAR(field_free_alignment(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(field_free_alignment(1), 3.0 / 5.0, 1e-15);
  EXPECT_NEAR(field_free_alignment(2), 11.0 / 21.0, 1e-15);
  EXPECT_THROW(field_free_alignment(-1), DomainError);
  for (int j = 0; j <= 5; ++j) {
    const auto obs = measure(Wavepacket::basis_state(RotorBasis(8), j));
    EXPECT_EQ(obs.orientation, 0.0);
    EXPECT_NEAR(obs.alignment, field_free_alignment(j), 1e-14);
    EXPECT_EQ(obs.kinetic_energy, j * (j + 1.0));
  }
}

TEST(Observables, RejectMismatchedOperators) {
  const auto psi = Wavepacket::basis_state(RotorBasis(5), 0);
  EXPECT_THROW(orientation(psi, build_cos_matrix(RotorBasis(6))), DomainError);
  EXPECT_THROW(orientation(psi, build_cos2_matrix(RotorBasis(5))), DomainError);
  EXPECT_THROW(alignment(psi, build_cos_matrix(RotorBasis(5))), DomainError);
  EXPECT_THROW(coherence_products(psi, 3), DomainError);
}

TEST(Observables, AngularDensityIntegratesToOne) {
  std::mt19937_64 rng(14);
  const auto psi = random_state(rng, 9);
  constexpr int n = 4000;
  std::vector<double> theta(n + 1);
  for (int i = 0; i <= n; ++i) theta[i] = std::numbers::pi * i / n;
  const auto rho = angular_density(psi, theta);
  double s = 0.0;
  const double h = std::numbers::pi / n;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * rho[i] * std::sin(theta[i]);
  }
  EXPECT_NEAR(2.0 * std::numbers::pi * s * h / 3.0, 1.0, 1e-10);
}

TEST(Observables, GroundStateDensityIsIsotropic) {
  const auto psi = Wavepacket::basis_state(RotorBasis(3), 0);
  const std::vector<double> theta{0.0, 0.7, 1.9, std::numbers::pi};
  for (double rho : angular_density(psi, theta)) {
    EXPECT_NEAR(rho, 1.0 / (4.0 * std::numbers::pi), 1e-15);
  }
}

TEST(Observables, OrientationVanishesAtFirstDrop) {
  const auto r = propagate_converged(PulseSpec(1.5, 3.044), 0);
  const auto obs = measure(r.final_state);
  EXPECT_LT(std::abs(obs.orientation), 0.02);
  EXPECT_LT(coherence_products(r.final_state, 1)[0], 1e-3);
}
