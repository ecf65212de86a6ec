#include "rotor/observables.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace rotor {
namespace {

void require_operator(const Wavepacket& psi, const OperatorMatrix& m, OperatorKind kind) {
  if (m.kind() != kind) {
    throw DomainError(
        fmt::format("expected a {} matrix, got {}", to_string(kind), to_string(m.kind())));
  }
  if (m.basis() != psi.basis()) {
    throw DomainError(fmt::format("{} matrix on j_max={} does not match wavepacket j_max={}",
                                  to_string(kind), m.basis().j_max(), psi.basis().j_max()));
  }
}

}  // namespace

double kinetic_energy(const Wavepacket& psi) {
  const auto& c = psi.coefficients();
  double e = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    e += static_cast<double>(j * (j + 1)) * std::norm(c[j]);
  }
  return e;
}

double orientation(const Wavepacket& psi, const OperatorMatrix& cos_mat) {
  require_operator(psi, cos_mat, OperatorKind::kCosTheta);
  const auto& c = psi.coefficients();
  double sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < c.size(); ++j) {
    sum += (std::conj(c[j]) * c[j + 1]).real() * cos_mat(j, j + 1);
  }
  return 2.0 * sum;
}

double alignment(const Wavepacket& psi, const OperatorMatrix& cos2_mat) {
  require_operator(psi, cos2_mat, OperatorKind::kCos2Theta);
  const auto& c = psi.coefficients();
  double diagonal = 0.0;
  double coherent = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    diagonal += std::norm(c[j]) * cos2_mat(j, j);
    if (j + 2 < c.size()) {
      coherent += (std::conj(c[j]) * c[j + 2]).real() * cos2_mat(j, j + 2);
    }
  }
  return diagonal + 2.0 * coherent;
}

std::vector<double> populations(const Wavepacket& psi) {
  const auto& c = psi.coefficients();
  std::vector<double> p(static_cast<std::size_t>(c.size()));
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    p[j] = std::norm(c[j]);
  }
  return p;
}

std::vector<double> coherence_products(const Wavepacket& psi, int delta) {
  if (delta != 1 && delta != 2) {
    throw DomainError(fmt::format("coherence offset must be 1 or 2, got {}", delta));
  }
  const auto& c = psi.coefficients();
  std::vector<double> out;
  for (Eigen::Index j = 0; j + delta < c.size(); ++j) {
    out.push_back(std::abs(std::conj(c[j]) * c[j + delta]));
  }
  return out;
}

ObservableSet measure(const Wavepacket& psi, const OperatorMatrix& cos_mat,
                      const OperatorMatrix& cos2_mat) {
  return ObservableSet{kinetic_energy(psi), orientation(psi, cos_mat), alignment(psi, cos2_mat),
                       populations(psi)};
}

ObservableSet measure(const Wavepacket& psi) {
  return measure(psi, build_cos_matrix(psi.basis()), build_cos2_matrix(psi.basis()));
}

std::vector<double> angular_density(const Wavepacket& psi, std::span<const double> theta) {
  const auto& c = psi.coefficients();
  std::vector<double> density;
  density.reserve(theta.size());
  for (double t : theta) {
    const double x = std::cos(t);
    // Legendre recurrence: (J+1) P_{J+1} = (2J+1) x P_J - J P_{J-1}.
    double p_prev = 1.0;
    double p_cur = x;
    Complex amplitude = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      double pj = 0.0;
      if (j == 0) {
        pj = 1.0;
      } else if (j == 1) {
        pj = x;
      } else {
        const double next = ((2.0 * j - 1.0) * x * p_cur - (j - 1.0) * p_prev) / j;
        p_prev = p_cur;
        p_cur = next;
        pj = next;
      }
      const double y = std::sqrt((2.0 * j + 1.0) / (4.0 * std::numbers::pi)) * pj;
      amplitude += c[j] * y;
    }
    density.push_back(std::norm(amplitude));
  }
  return density;
}

double field_free_alignment(int j) {
  if (j < 0) {
    throw DomainError(fmt::format("rotational level must be >= 0, got {}", j));
  }
  const double jd = j;
  return (2.0 * jd * jd + 2.0 * jd - 1.0) / ((2.0 * jd - 1.0) * (2.0 * jd + 3.0));
}

}  // namespace rotor
