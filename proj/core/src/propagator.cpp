#include "rotor/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace rotor {
namespace {

constexpr Complex kI{0.0, 1.0};

struct Tridiagonal {
  RealVector diagonal;
  RealVector off_diagonal;
};

Tridiagonal hamiltonian_bands(const RotorBasis& basis, const PulseSpec& pulse) {
  const int n = basis.dimension();
  Tridiagonal t{RealVector(n), RealVector(n - 1)};
  for (int j = 0; j < n; ++j) {
    t.diagonal[j] = pulse.duration() * (static_cast<double>(j) * (j + 1));
  }
  for (int j = 0; j + 1 < n; ++j) {
    t.off_diagonal[j] = -pulse.strength() * cos_coupling(j);
  }
  return t;
}

Eigen::SelfAdjointEigenSolver<RealMatrix> diagonalize(const Tridiagonal& t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(t.diagonal, t.off_diagonal, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("tridiagonal eigendecomposition did not converge");
  }
  return solver;
}

// Column `source` of V exp(i * phase_scale * Lambda) V^T.
ComplexVector apply_exponential(const Eigen::SelfAdjointEigenSolver<RealMatrix>& solver,
                                double phase_scale, int source) {
  const RealMatrix& v = solver.eigenvectors();
  const RealVector& lambda = solver.eigenvalues();
  ComplexVector weights(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    weights[k] = std::exp(kI * (phase_scale * lambda[k])) * v(source, k);
  }
  return v.cast<Complex>() * weights;
}

void require_initial_state(int j0, const RotorBasis& basis) {
  if (!basis.contains(j0)) {
    throw DomainError(
        fmt::format("initial state J0={} outside basis with j_max={}", j0, basis.j_max()));
  }
}

}  // namespace

std::string to_string(PropagationMethod method) {
  return method == PropagationMethod::kSpectral ? "spectral" : "ode_rk4";
}

double basis_leak(const Wavepacket& psi) {
  const auto& c = psi.coefficients();
  const auto n = c.size();
  return std::norm(c[n - 1]) + std::norm(c[n - 2]);
}

PropagationReport propagate_spectral(const PulseSpec& pulse, int j0, const RotorBasis& basis) {
  require_initial_state(j0, basis);
  const auto solver = diagonalize(hamiltonian_bands(basis, pulse));
  Wavepacket psi(basis, apply_exponential(solver, -1.0, j0), j0);
  PropagationReport report{std::move(psi), PropagationMethod::kSpectral};
  report.norm_drift = report.final_state.norm_defect();
  report.basis_leak = basis_leak(report.final_state);
  return report;
}

PropagationReport propagate_ode(const PulseSpec& pulse, int j0, const RotorBasis& basis,
                                int steps) {
  require_initial_state(j0, basis);
  if (steps < kMinRk4Steps) {
    throw DomainError(fmt::format("RK4 needs at least {} steps, got {}", kMinRk4Steps, steps));
  }
  const Tridiagonal h = hamiltonian_bands(basis, pulse);
  const int n = basis.dimension();
  const double dt = 1.0 / steps;

  // dC/dtau = -i H C with H tridiagonal.
  auto rhs = [&](const ComplexVector& c, ComplexVector& out) {
    for (int j = 0; j < n; ++j) {
      Complex hc = h.diagonal[j] * c[j];
      if (j > 0) hc += h.off_diagonal[j - 1] * c[j - 1];
      if (j + 1 < n) hc += h.off_diagonal[j] * c[j + 1];
      out[j] = -kI * hc;
    }
  };

  ComplexVector c = ComplexVector::Zero(n);
  c[j0] = 1.0;
  ComplexVector k1(n), k2(n), k3(n), k4(n), stage(n);
  for (int s = 0; s < steps; ++s) {
    rhs(c, k1);
    stage = c + (0.5 * dt) * k1;
    rhs(stage, k2);
    stage = c + (0.5 * dt) * k2;
    rhs(stage, k3);
    stage = c + dt * k3;
    rhs(stage, k4);
    c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  PropagationReport report{Wavepacket(basis, std::move(c), j0), PropagationMethod::kOdeRk4};
  report.norm_drift = report.final_state.norm_defect();
  report.basis_leak = basis_leak(report.final_state);

  // RK4 on an oscillator is stable for |lambda dt| < 2 sqrt(2); well below
  // that the drift is the useful diagnostic.
  const double spectral_bound =
      h.diagonal.cwiseAbs().maxCoeff() + 2.0 * h.off_diagonal.cwiseAbs().maxCoeff();
  if (spectral_bound * dt > 1.0) {
    report.has_warning = true;
    report.warning = fmt::format("step size {:.3g} too coarse for spectral radius {:.3g}", dt,
                                 spectral_bound);
  } else if (report.norm_drift > 1e-10) {
    report.has_warning = true;
    report.warning = fmt::format("norm drift {:.3g} exceeds 1e-10; increase steps",
                                 report.norm_drift);
  }
  return report;
}

int delta_kick_padding(double strength) {
  return std::max(8, static_cast<int>(std::ceil(2.0 * strength)));
}

Wavepacket delta_kick(double strength, int j0, const RotorBasis& basis) {
  if (!std::isfinite(strength) || strength < 0.0) {
    throw DomainError(fmt::format("kick strength must be finite and >= 0, got {}", strength));
  }
  require_initial_state(j0, basis);
  const RotorBasis padded = basis.padded(delta_kick_padding(strength));
  const int n = padded.dimension();
  Tridiagonal cos_bands{RealVector::Zero(n), RealVector(n - 1)};
  for (int j = 0; j + 1 < n; ++j) {
    cos_bands.off_diagonal[j] = cos_coupling(j);
  }
  const ComplexVector full = apply_exponential(diagonalize(cos_bands), strength, j0);
  return Wavepacket(basis, full.head(basis.dimension()), j0);
}

RotorBasis converge_basis(const PulseSpec& pulse, int j0, const BasisSearch& search) {
  return propagate_converged(pulse, j0, search).final_state.basis();
}

PropagationReport propagate_converged(const PulseSpec& pulse, int j0,
                                      const BasisSearch& search) {
  if (!(search.leak_tol > 0.0 && search.leak_tol < 1.0)) {
    throw DomainError(fmt::format("leak tolerance must lie in (0, 1), got {}", search.leak_tol));
  }
  if (j0 < 0) {
    throw DomainError(fmt::format("initial state J0 must be >= 0, got {}", j0));
  }
  if (search.step < 1) {
    throw DomainError(fmt::format("basis growth step must be >= 1, got {}", search.step));
  }
  double last_leak = 1.0;
  for (int j_max = j0 + 4; j_max <= search.j_max_cap; j_max += search.step) {
    auto report = propagate_spectral(pulse, j0, RotorBasis(j_max));
    last_leak = report.basis_leak;
    if (last_leak < search.leak_tol) {
      return report;
    }
  }
  throw NumericError(fmt::format(
      "basis did not converge for P={}, sigma={}, J0={}: leak {:.3g} at cap j_max={}",
      pulse.strength(), pulse.duration(), j0, last_leak, search.j_max_cap));
}

}  // namespace rotor
