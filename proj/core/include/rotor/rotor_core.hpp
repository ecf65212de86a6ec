#pragma once

// Dimensionless data model of a polar linear rigid rotor kicked by a
// rectangular electric pulse, and the operator matrices in the m = 0
// free-rotor basis {|J,0>, J = 0..j_max}.

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rotor {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Precondition violated by a caller (bad range, mismatched basis, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed to deliver (eigensolver, basis convergence).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pulse parameters in reduced units.
///
/// Only the strength P and duration sigma are stored; the orienting
/// parameter eta is always derived as P / sigma.
class PulseSpec {
 public:
  /// Throws DomainError unless strength >= 0 and duration > 0 (both finite).
  PulseSpec(double strength, double duration);

  double strength() const noexcept { return strength_; }
  double duration() const noexcept { return duration_; }
  double interaction() const noexcept { return strength_ / duration_; }

 private:
  double strength_;
  double duration_;
};

/// Pulse described in physical units. All four quantities must be expressed
/// in one unit system together with hbar: dipole * field and
/// rotational_constant are energies, duration is a time, hbar is
/// energy * time.
struct PhysicalPulse {
  double dipole_moment = 0.0;
  double field_strength = 0.0;
  double rotational_constant = 0.0;
  double duration = 0.0;
};

namespace units {
// CODATA 2018.
inline constexpr double kHbarJouleSecond = 1.054571817e-34;
inline constexpr double kSpeedOfLightCmPerSecond = 2.99792458e10;
/// hbar in cm^-1 * ns, i.e. 1 / (2 pi c) with c in cm/ns.
inline constexpr double kHbarWavenumberNanosecond =
    1.0 / (2.0 * 3.14159265358979323846 * kSpeedOfLightCmPerSecond * 1e-9);
}  // namespace units

/// sigma = B s / hbar, eta = mu eps / B, P = mu eps s / hbar.
///
/// A vanishing dipole or field is accepted (no coupling, P = 0); negative
/// values, a non-positive rotational constant, duration or hbar are not.
PulseSpec dimensionless_from_physical(const PhysicalPulse& pulse, double hbar);

/// Truncated free-rotor basis with m = 0, ordered J = 0, 1, ..., j_max.
class RotorBasis {
 public:
  explicit RotorBasis(int j_max);

  int j_max() const noexcept { return j_max_; }
  int dimension() const noexcept { return j_max_ + 1; }
  bool contains(int j) const noexcept { return j >= 0 && j <= j_max_; }

  /// Same basis grown by `extra` levels.
  RotorBasis padded(int extra) const;

  friend bool operator==(const RotorBasis&, const RotorBasis&) = default;

 private:
  int j_max_;
};

/// Expansion coefficients C_J of a rotor state over a RotorBasis, tagged
/// with the initial state J0 it was propagated from.
///
/// Length and J0 are validated on construction. The norm is not enforced
/// so that unrenormalized integrator output can be carried and diagnosed;
/// use norm_defect() to check it.
class Wavepacket {
 public:
  Wavepacket(RotorBasis basis, ComplexVector coefficients, int initial_state);

  /// |J0, 0>.
  static Wavepacket basis_state(RotorBasis basis, int j0);

  const RotorBasis& basis() const noexcept { return basis_; }
  const ComplexVector& coefficients() const noexcept { return coefficients_; }
  int initial_state() const noexcept { return initial_state_; }
  Complex operator[](int j) const { return coefficients_[j]; }

  double norm_squared() const { return coefficients_.squaredNorm(); }
  double norm_defect() const { return std::abs(1.0 - norm_squared()); }
  bool is_normalized(double tol = 1e-10) const { return norm_defect() <= tol; }

 private:
  RotorBasis basis_;
  ComplexVector coefficients_;
  int initial_state_;
};

enum class OperatorKind {
  kAngularMomentumSquared,
  kCosTheta,
  kCos2Theta,
  kHamiltonian,
};

std::string_view to_string(OperatorKind kind);

/// Half-bandwidth of the matrix of a given operator in the m = 0 basis.
int bandwidth(OperatorKind kind);

/// Real symmetric banded operator matrix in the free-rotor basis.
/// Stored dense; symmetry and band structure are checked on construction.
class OperatorMatrix {
 public:
  OperatorMatrix(RotorBasis basis, OperatorKind kind, RealMatrix entries);

  const RotorBasis& basis() const noexcept { return basis_; }
  OperatorKind kind() const noexcept { return kind_; }
  const RealMatrix& entries() const noexcept { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

  /// <psi|M|psi> as a dense quadratic form.
  double expectation(const ComplexVector& psi) const;

 private:
  RotorBasis basis_;
  OperatorKind kind_;
  RealMatrix entries_;
};

/// <J,0|cos(theta)|J+1,0> = (J+1) / sqrt((2J+1)(2J+3)).
double cos_coupling(int j);

OperatorMatrix build_j2_matrix(const RotorBasis& basis);
OperatorMatrix build_cos_matrix(const RotorBasis& basis);

/// cos^2(theta) as the square of the cos(theta) matrix on the basis padded
/// by one level, truncated back; the padding keeps the (j_max, j_max)
/// element exact.
OperatorMatrix build_cos2_matrix(const RotorBasis& basis);

/// sigma * J^2 - P * cos(theta): the generator of the rescaled-time
/// evolution, i dC/dtau = H C, on tau in [0, 1].
OperatorMatrix build_hamiltonian(const RotorBasis& basis, const PulseSpec& pulse);

}  // namespace rotor
