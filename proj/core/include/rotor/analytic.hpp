#pragma once

// Closed-form two-level reduction of the kicked rotor, built from the
// |0,0>/|1,0> block (J0 = 0) or the |1,0>/|2,0> block (J0 = 1) of
// i sigma [[0, eta/sqrt3, ...], [eta/sqrt3, -2, 2eta/sqrt15, ...], ...],
// and the pulse durations at which the transfer amplitude vanishes.

#include <array>
#include <vector>

#include "rotor/rotor_core.hpp"

namespace rotor::analytic {

/// sin(x)/x with sinc(0) = 1; Taylor series for |x| < 1e-4.
double sinc(double x);

struct TwoLevelSolution {
  int j0 = 0;
  /// Purely imaginary; lambda_1 carries the '+' branch.
  std::array<Complex, 2> eigenvalues{};
  /// Unnormalized, second component 1 (the uncoupled unit vectors when eta = 0).
  std::array<std::array<double, 2>, 2> eigenvectors{};
  /// Integration constants; A1 = -A2 whenever eta > 0.
  std::array<double, 2> constants{};
  /// Factor xi in the sinc argument sigma * xi.
  double sinc_factor = 1.0;
  PulseSpec pulse{0.0, 1.0};

  /// A1 exp(lambda_1 tau) nu_1 + A2 exp(lambda_2 tau) nu_2: the
  /// (initial, target) amplitudes of the two-level model at time tau.
  std::array<Complex, 2> amplitudes(double tau = 1.0) const;
};

/// J0 in {0, 1}.
TwoLevelSolution two_level_solution(int j0, const PulseSpec& pulse);

/// C_1^0 = i P sinc(sigma xi0) / sqrt3 * exp(i sigma).
Complex coefficient_c1_of_0(const PulseSpec& pulse);

/// C_2^1 = 2i P sinc(sigma xi1) / sqrt15 * exp(4 i sigma).
Complex coefficient_c2_of_1(const PulseSpec& pulse);

struct ZeroLocus {
  int n = 0;
  double sigma_exact = 0.0;
  /// First-order expansion of sigma_exact in P^2.
  double sigma_taylor = 0.0;
};

/// Durations with a vanishing two-level transfer amplitude at fixed P, for
/// n = 1..n_max. Orders without a positive real root are omitted.
std::vector<ZeroLocus> zero_loci(int j0, double strength, int n_max);

/// sigma_n(P) for a single order, or a negative value when the root does not exist.
double zero_locus(int j0, double strength, int n);

/// Largest P below which every order n >= 1 has a root:
/// sqrt(3) pi for J0 = 0, sqrt(15)/2 pi for J0 = 1.
double existence_threshold(int j0);

}  // namespace rotor::analytic
