#include "rotor/analytic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace rotor::analytic {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

void require_two_level_state(int j0) {
  if (j0 != 0 && j0 != 1) {
    throw DomainError(fmt::format("two-level model exists for J0 in {{0, 1}}, got {}", j0));
  }
}

// eigenvalues: -i sigma * level_shift * (centre +- sqrt(1 + eta^2 / coupling_denominator))
struct Block {
  double coupling_denominator;
  double level_shift;
  double centre;
};

Block block_for(int j0) {
  return j0 == 0 ? Block{3.0, 1.0, 1.0} : Block{15.0, 2.0, 2.0};
}

}  // namespace

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

TwoLevelSolution two_level_solution(int j0, const PulseSpec& pulse) {
  require_two_level_state(j0);
  const Block b = block_for(j0);
  const double sigma = pulse.duration();
  const double eta = pulse.interaction();
  const double root = std::sqrt(1.0 + eta * eta / b.coupling_denominator);

  TwoLevelSolution s;
  s.j0 = j0;
  s.pulse = pulse;
  s.sinc_factor = b.level_shift * root;
  s.eigenvalues[0] = -kI * (sigma * b.level_shift * (b.centre + root));
  s.eigenvalues[1] = -kI * (sigma * b.level_shift * (b.centre - root));

  if (eta == 0.0) {
    // Uncoupled limit: lambda_1 belongs to the upper level, lambda_2 to the
    // initial one.
    s.eigenvectors[0] = {0.0, 1.0};
    s.eigenvectors[1] = {1.0, 0.0};
    s.constants = {0.0, 1.0};
    return s;
  }

  const double scale = std::sqrt(b.coupling_denominator) / eta;
  s.eigenvectors[0] = {scale * (1.0 - root), 1.0};
  s.eigenvectors[1] = {scale * (1.0 + root), 1.0};
  const double a1 = -eta / (2.0 * std::sqrt(b.coupling_denominator + eta * eta));
  s.constants = {a1, -a1};
  return s;
}

std::array<Complex, 2> TwoLevelSolution::amplitudes(double tau) const {
  std::array<Complex, 2> c{};
  for (int k = 0; k < 2; ++k) {
    const Complex w = constants[k] * std::exp(eigenvalues[k] * tau);
    c[0] += w * eigenvectors[k][0];
    c[1] += w * eigenvectors[k][1];
  }
  return c;
}

Complex coefficient_c1_of_0(const PulseSpec& pulse) {
  const double sigma = pulse.duration();
  const double xi = two_level_solution(0, pulse).sinc_factor;
  return kI * pulse.strength() * sinc(sigma * xi) / std::sqrt(3.0) * std::exp(kI * sigma);
}

Complex coefficient_c2_of_1(const PulseSpec& pulse) {
  const double sigma = pulse.duration();
  const double xi = two_level_solution(1, pulse).sinc_factor;
  return 2.0 * kI * pulse.strength() * sinc(sigma * xi) / std::sqrt(15.0) *
         std::exp(4.0 * kI * sigma);
}

double zero_locus(int j0, double strength, int n) {
  require_two_level_state(j0);
  const double n2pi2 = static_cast<double>(n) * n * kPi * kPi;
  const double radicand = j0 == 0 ? (3.0 * n2pi2 - strength * strength) / 3.0
                                  : (15.0 * n2pi2 - 4.0 * strength * strength) / 60.0;
  return radicand > 0.0 ? std::sqrt(radicand) : -1.0;
}

std::vector<ZeroLocus> zero_loci(int j0, double strength, int n_max) {
  require_two_level_state(j0);
  if (!std::isfinite(strength) || strength < 0.0) {
    throw DomainError(fmt::format("pulse strength must be finite and >= 0, got {}", strength));
  }
  if (n_max < 1) {
    throw DomainError(fmt::format("n_max must be >= 1, got {}", n_max));
  }
  std::vector<ZeroLocus> out;
  const double p2 = strength * strength;
  for (int n = 1; n <= n_max; ++n) {
    const double exact = zero_locus(j0, strength, n);
    if (exact < 0.0) continue;
    const double npi = n * kPi;
    const double taylor = j0 == 0 ? npi * (1.0 - p2 / (6.0 * npi * npi))
                                  : 0.5 * npi * (1.0 - 2.0 * p2 / (15.0 * npi * npi));
    out.push_back({n, exact, taylor});
  }
  return out;
}

double existence_threshold(int j0) {
  require_two_level_state(j0);
  return j0 == 0 ? std::sqrt(3.0) * kPi : 0.5 * std::sqrt(15.0) * kPi;
}

}  // namespace rotor::analytic
