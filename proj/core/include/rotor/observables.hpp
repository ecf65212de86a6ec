#pragma once

#include <span>
#include <vector>

#include "rotor/rotor_core.hpp"

namespace rotor {

struct ObservableSet {
  /// <J^2> in units of B.
  double kinetic_energy = 0.0;
  /// <cos theta>.
  double orientation = 0.0;
  /// <cos^2 theta>.
  double alignment = 0.0;
  std::vector<double> populations;
};

double kinetic_energy(const Wavepacket& psi);

/// 2 Re sum_J C_J^* C_{J+1} <J|cos|J+1>. `cos_mat` must be a cos(theta)
/// matrix on the wavepacket's basis.
double orientation(const Wavepacket& psi, const OperatorMatrix& cos_mat);

/// sum_J |C_J|^2 <J|cos^2|J> + 2 Re sum_J C_J^* C_{J+2} <J|cos^2|J+2>.
double alignment(const Wavepacket& psi, const OperatorMatrix& cos2_mat);

std::vector<double> populations(const Wavepacket& psi);

/// |C_J^* C_{J+delta}| for J = 0 .. j_max - delta; delta in {1, 2}.
std::vector<double> coherence_products(const Wavepacket& psi, int delta);

ObservableSet measure(const Wavepacket& psi, const OperatorMatrix& cos_mat,
                      const OperatorMatrix& cos2_mat);

/// Builds the operator matrices on the wavepacket's own basis.
ObservableSet measure(const Wavepacket& psi);

/// |sum_J C_J Y_J0(theta)|^2 at each polar angle (radians). Integrates to 1
/// over the sphere for a normalized state.
std::vector<double> angular_density(const Wavepacket& psi, std::span<const double> theta);

/// <cos^2 theta> of the field-free state |J, 0>: (2J^2 + 2J - 1) / ((2J-1)(2J+3)).
double field_free_alignment(int j);

}  // namespace rotor
