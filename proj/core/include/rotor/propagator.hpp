#pragma once

// Evolution of a rotor state across a rectangular pulse. The generator is
// constant on tau in [0, 1], so the exact propagator is exp(-iH); it is
// applied through the eigendecomposition of the tridiagonal Hamiltonian.
// A fixed-step RK4 integrator provides an independent route, and the
// impulsive limit sigma -> 0 is available as the delta kick exp(iP cos).

#include <string>

#include "rotor/rotor_core.hpp"

namespace rotor {

enum class PropagationMethod { kSpectral, kOdeRk4 };

std::string to_string(PropagationMethod method);

struct PropagationReport {
  Wavepacket final_state;
  PropagationMethod method = PropagationMethod::kSpectral;
  /// |1 - sum |C_J|^2| of the final state.
  double norm_drift = 0.0;
  /// Total population in the two highest basis states.
  double basis_leak = 0.0;
  /// Set when the result is usable but not trustworthy at the requested
  /// accuracy (e.g. too few RK4 steps); `warning` carries the reason.
  bool has_warning = false;
  std::string warning;
};

/// Total population of the two highest basis states.
double basis_leak(const Wavepacket& psi);

/// C(1) = U exp(-i Lambda) U^T e_{J0}.
PropagationReport propagate_spectral(const PulseSpec& pulse, int j0, const RotorBasis& basis);

inline constexpr int kDefaultRk4Steps = 100000;
inline constexpr int kMinRk4Steps = 1000;

/// Classical RK4 on dC/dtau = -i H C, tau in [0, 1], without renormalization.
PropagationReport propagate_ode(const PulseSpec& pulse, int j0, const RotorBasis& basis,
                                int steps = kDefaultRk4Steps);

/// Levels added above the target basis when building the kick operator.
int delta_kick_padding(double strength);

/// exp(iP cos(theta)) |J0, 0>, evaluated on a padded basis and truncated.
Wavepacket delta_kick(double strength, int j0, const RotorBasis& basis);

struct BasisSearch {
  double leak_tol = 1e-10;
  int j_max_cap = 400;
  int step = 4;
};

/// Smallest basis j_max = J0 + 4, J0 + 8, ... whose spectral propagation
/// leaks less than `leak_tol` into the top two levels. Throws NumericError
/// once the cap is exceeded.
RotorBasis converge_basis(const PulseSpec& pulse, int j0, const BasisSearch& search = {});

/// Spectral propagation on the basis chosen by converge_basis.
PropagationReport propagate_converged(const PulseSpec& pulse, int j0,
                                      const BasisSearch& search = {});

}  // namespace rotor
