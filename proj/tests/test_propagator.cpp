#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rotor/propagator.hpp"

using namespace rotor;

namespace {

double max_abs_diff(const ComplexVector& a, const ComplexVector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Spectral, FreeRotorOnlyPicksUpAPhase) {
  const RotorBasis b(6);
  for (int j0 : {0, 1, 3}) {
    const double sigma = 0.37;
    const auto r = propagate_spectral(PulseSpec(0.0, sigma), j0, b);
    const Complex expected = std::exp(Complex(0.0, -sigma * j0 * (j0 + 1)));
    for (int j = 0; j <= 6; ++j) {
      EXPECT_NEAR(std::abs(r.final_state[j] - (j == j0 ? expected : Complex(0.0))), 0.0, 1e-13);
    }
  }
}

TEST(Spectral, PreservesNorm) {
  const RotorBasis b(30);
  for (double p : {0.5, 3.0, 9.5}) {
    for (double s : {0.01, 1.0, 10.0}) {
      const auto r = propagate_spectral(PulseSpec(p, s), 1, b);
      EXPECT_LT(r.norm_drift, 1e-12) << p << " " << s;
      EXPECT_EQ(r.method, PropagationMethod::kSpectral);
    }
  }
}

TEST(Spectral, ColumnsStayOrthogonal) {
  const RotorBasis b(20);
  const PulseSpec pulse(4.0, 2.5);
  const auto a = propagate_spectral(pulse, 0, b).final_state.coefficients();
  const auto c = propagate_spectral(pulse, 1, b).final_state.coefficients();
  EXPECT_LT(std::abs(a.dot(c)), 1e-13);
}

TEST(Spectral, RejectsInitialStateOutsideBasis) {
  EXPECT_THROW(propagate_spectral(PulseSpec(1, 1), 5, RotorBasis(4)), DomainError);
  EXPECT_THROW(propagate_spectral(PulseSpec(1, 1), -1, RotorBasis(4)), DomainError);
}

TEST(Ode, AgreesWithSpectral) {
  const RotorBasis b(16);
  const PulseSpec pulse(3.0, 2.0);
  const auto s = propagate_spectral(pulse, 0, b);
  const auto o = propagate_ode(pulse, 0, b, 20000);
  EXPECT_EQ(o.method, PropagationMethod::kOdeRk4);
  EXPECT_LT(max_abs_diff(s.final_state.coefficients(), o.final_state.coefficients()), 1e-9);
  EXPECT_FALSE(o.has_warning) << o.warning;
}

TEST(Ode, TooFewStepsRejectedAndCoarseStepsWarned) {
  const RotorBasis b(40);
  EXPECT_THROW(propagate_ode(PulseSpec(1.0, 1.0), 0, b, 999), DomainError);
  const auto r = propagate_ode(PulseSpec(1.0, 10.0), 0, b, 1000);
  EXPECT_TRUE(r.has_warning);
  EXPECT_FALSE(r.warning.empty());
}

TEST(Kick, MatchesSphericalBesselOracle) {
  for (double p : {0.3, 1.5, 4.0}) {
    const RotorBasis b(25);
    const Wavepacket psi = delta_kick(p, 0, b);
    for (int j = 0; j <= 12; ++j) {
      // exp(iP cos) |0,0> = sum_J i^J sqrt(2J+1) j_J(P) |J,0>.
      const Complex expected = std::pow(Complex(0.0, 1.0), j) * std::sqrt(2.0 * j + 1.0) *
                               std::sph_bessel(static_cast<unsigned>(j), p);
      EXPECT_NEAR(std::abs(psi[j] - expected), 0.0, 1e-12) << "P=" << p << " J=" << j;
    }
  }
}

TEST(Kick, ShortPulseApproachesKick) {
  const RotorBasis b(24);
  for (int j0 : {0, 1, 2}) {
    const auto r = propagate_spectral(PulseSpec(1.5, 1e-4), j0, b);
    const auto kick = delta_kick(1.5, j0, b);
    EXPECT_LT(max_abs_diff(r.final_state.coefficients(), kick.coefficients()), 1e-3);
  }
}

TEST(Kick, PaddingRule) {
  EXPECT_EQ(delta_kick_padding(0.0), 8);
  EXPECT_EQ(delta_kick_padding(4.0), 8);
  EXPECT_EQ(delta_kick_padding(4.1), 9);
  EXPECT_EQ(delta_kick_padding(10.0), 20);
  EXPECT_THROW(delta_kick(-1.0, 0, RotorBasis(3)), DomainError);
}

TEST(Symmetry, TransitionMagnitudesAreSymmetric) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> p(0.0, 8.0), s(0.05, 8.0);
  const RotorBasis b(40);
  for (int k = 0; k < 10; ++k) {
    const PulseSpec pulse(p(rng), s(rng));
    for (int m = 0; m <= 3; ++m) {
      const auto from_m = propagate_spectral(pulse, m, b).final_state;
      for (int n = 0; n <= 3; ++n) {
        const auto from_n = propagate_spectral(pulse, n, b).final_state;
        EXPECT_NEAR(std::abs(from_m[n]), std::abs(from_n[m]), 1e-12);
      }
    }
  }
}

TEST(BasisSearch, ConvergesBelowTolerance) {
  const PulseSpec pulse(6.0, 1.0);
  const RotorBasis b = converge_basis(pulse, 0);
  const auto r = propagate_spectral(pulse, 0, b);
  EXPECT_LT(r.basis_leak, 1e-10);
  EXPECT_EQ(b.j_max() % 4, 0);
  // One step smaller must leak more.
  if (b.j_max() > 4) {
    EXPECT_GE(propagate_spectral(pulse, 0, RotorBasis(b.j_max() - 4)).basis_leak, 1e-10);
  }
}

TEST(BasisSearch, CapRaisesNumericError) {
  EXPECT_THROW(converge_basis(PulseSpec(10.0, 0.5), 0, BasisSearch{1e-10, 6, 4}), NumericError);
  EXPECT_THROW(converge_basis(PulseSpec(1.0, 1.0), 0, BasisSearch{1e-10, 20, 0}), DomainError);
}

TEST(BasisLeak, SumsTopTwoLevels) {
  ComplexVector c = ComplexVector::Zero(5);
  c[0] = 0.5;
  c[3] = Complex(0.0, 0.5);
  c[4] = 0.5;
  EXPECT_DOUBLE_EQ(basis_leak(Wavepacket(RotorBasis(4), c, 0)), 0.5);
}
