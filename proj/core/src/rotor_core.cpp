#include "rotor/rotor_core.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace rotor {

PulseSpec::PulseSpec(double strength, double duration)
    : strength_(strength), duration_(duration) {
  if (!std::isfinite(strength) || strength < 0.0) {
    throw DomainError(fmt::format("pulse strength must be finite and >= 0, got {}", strength));
  }
  if (!std::isfinite(duration) || duration <= 0.0) {
    throw DomainError(fmt::format("pulse duration must be finite and > 0, got {}", duration));
  }
}

PulseSpec dimensionless_from_physical(const PhysicalPulse& pulse, double hbar) {
  auto require = [](double value, bool allow_zero, const char* name) {
    if (!std::isfinite(value) || value < 0.0 || (!allow_zero && value == 0.0)) {
      throw DomainError(fmt::format("{} must be {}, got {}", name,
                                    allow_zero ? "finite and >= 0" : "finite and > 0", value));
    }
  };
  require(pulse.dipole_moment, true, "dipole moment");
  require(pulse.field_strength, true, "field strength");
  require(pulse.rotational_constant, false, "rotational constant");
  require(pulse.duration, false, "pulse duration");
  require(hbar, false, "hbar");

  const double sigma = pulse.rotational_constant * pulse.duration / hbar;
  const double strength = pulse.dipole_moment * pulse.field_strength * pulse.duration / hbar;
  return PulseSpec(strength, sigma);
}

RotorBasis::RotorBasis(int j_max) : j_max_(j_max) {
  if (j_max < 1) {
    throw DomainError(fmt::format("basis j_max must be >= 1, got {}", j_max));
  }
}

RotorBasis RotorBasis::padded(int extra) const {
  if (extra < 0) {
    throw DomainError(fmt::format("basis padding must be >= 0, got {}", extra));
  }
  return RotorBasis(j_max_ + extra);
}

Wavepacket::Wavepacket(RotorBasis basis, ComplexVector coefficients, int initial_state)
    : basis_(basis), coefficients_(std::move(coefficients)), initial_state_(initial_state) {
  if (coefficients_.size() != basis_.dimension()) {
    throw DomainError(fmt::format("wavepacket has {} coefficients but basis dimension is {}",
                                  coefficients_.size(), basis_.dimension()));
  }
  if (!basis_.contains(initial_state_)) {
    throw DomainError(fmt::format("initial state J0={} outside basis with j_max={}",
                                  initial_state_, basis_.j_max()));
  }
}

Wavepacket Wavepacket::basis_state(RotorBasis basis, int j0) {
  if (!basis.contains(j0)) {
    throw DomainError(
        fmt::format("initial state J0={} outside basis with j_max={}", j0, basis.j_max()));
  }
  ComplexVector c = ComplexVector::Zero(basis.dimension());
  c[j0] = 1.0;
  return Wavepacket(basis, std::move(c), j0);
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kAngularMomentumSquared: return "J2";
    case OperatorKind::kCosTheta: return "cos";
    case OperatorKind::kCos2Theta: return "cos2";
    case OperatorKind::kHamiltonian: return "hamiltonian";
  }
  return "unknown";
}

int bandwidth(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kAngularMomentumSquared: return 0;
    case OperatorKind::kCosTheta: return 1;
    case OperatorKind::kCos2Theta: return 2;
    case OperatorKind::kHamiltonian: return 1;
  }
  return 0;
}

OperatorMatrix::OperatorMatrix(RotorBasis basis, OperatorKind kind, RealMatrix entries)
    : basis_(basis), kind_(kind), entries_(std::move(entries)) {
  const int n = basis_.dimension();
  if (entries_.rows() != n || entries_.cols() != n) {
    throw DomainError(fmt::format("{} matrix is {}x{}, basis dimension is {}", to_string(kind_),
                                  entries_.rows(), entries_.cols(), n));
  }
  const int band = bandwidth(kind_);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw DomainError(fmt::format("{} matrix not symmetric at ({}, {})", to_string(kind_), i, j));
      }
      if (std::abs(i - j) > band && entries_(i, j) != 0.0) {
        throw DomainError(
            fmt::format("{} matrix has entry outside its band at ({}, {})", to_string(kind_), i, j));
      }
    }
  }
}

double OperatorMatrix::expectation(const ComplexVector& psi) const {
  if (psi.size() != entries_.rows()) {
    throw DomainError(fmt::format("state of length {} does not match {} matrix of size {}",
                                  psi.size(), to_string(kind_), entries_.rows()));
  }
  return psi.dot(entries_.cast<Complex>() * psi).real();
}

double cos_coupling(int j) {
  const double jp1 = j + 1.0;
  return std::sqrt(jp1 * jp1 / ((2.0 * j + 3.0) * (2.0 * j + 1.0)));
}

OperatorMatrix build_j2_matrix(const RotorBasis& basis) {
  const int n = basis.dimension();
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    m(j, j) = static_cast<double>(j) * (j + 1);
  }
  return OperatorMatrix(basis, OperatorKind::kAngularMomentumSquared, std::move(m));
}

OperatorMatrix build_cos_matrix(const RotorBasis& basis) {
  const int n = basis.dimension();
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    const double c = cos_coupling(j);
    m(j, j + 1) = c;
    m(j + 1, j) = c;
  }
  return OperatorMatrix(basis, OperatorKind::kCosTheta, std::move(m));
}

OperatorMatrix build_cos2_matrix(const RotorBasis& basis) {
  const RealMatrix cos_padded = build_cos_matrix(basis.padded(1)).entries();
  const int n = basis.dimension();
  RealMatrix square = (cos_padded * cos_padded).topLeftCorner(n, n);
  // The product is symmetric in exact arithmetic; make it so bitwise and
  // clear rounding noise outside the pentadiagonal band.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = (j - i) == 1 || (j - i) > 2 ? 0.0 : square(i, j);
      square(i, j) = v;
      square(j, i) = v;
    }
  }
  return OperatorMatrix(basis, OperatorKind::kCos2Theta, std::move(square));
}

OperatorMatrix build_hamiltonian(const RotorBasis& basis, const PulseSpec& pulse) {
  const int n = basis.dimension();
  const double sigma = pulse.duration();
  const double p = pulse.strength();
  RealMatrix h = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = sigma * (static_cast<double>(j) * (j + 1));
  }
  for (int j = 0; j + 1 < n; ++j) {
    const double off = -p * cos_coupling(j);
    h(j, j + 1) = off;
    h(j + 1, j) = off;
  }
  return OperatorMatrix(basis, OperatorKind::kHamiltonian, std::move(h));
}

}  // namespace rotor
