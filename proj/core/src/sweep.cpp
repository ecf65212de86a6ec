#include "rotor/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "rotor/analytic.hpp"
#include "rotor/propagator.hpp"

namespace rotor {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_increasing(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) {
    throw DomainError(fmt::format("sweep axis {} is empty", name));
  }
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) {
      throw DomainError(fmt::format("sweep axis {} has a non-finite value", name));
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw DomainError(fmt::format("sweep axis {} is not strictly increasing at index {}", name, i));
    }
  }
}

SweepRecord evaluate_point(double strength, double duration, const SweepGrid& grid,
                           const OperatorMatrix* fixed_cos, const OperatorMatrix* fixed_cos2) {
  SweepRecord rec;
  rec.strength = strength;
  rec.duration = duration;
  const PulseSpec pulse(strength, duration);
  try {
    PropagationReport report = std::visit(
        [&](const auto& policy) {
          using Policy = std::decay_t<decltype(policy)>;
          if constexpr (std::is_same_v<Policy, FixedBasis>) {
            return propagate_spectral(pulse, grid.j0, RotorBasis(policy.j_max));
          } else {
            return propagate_converged(pulse, grid.j0,
                                       BasisSearch{policy.leak_tol, policy.j_max_cap});
          }
        },
        grid.basis);
    const Wavepacket& psi = report.final_state;
    rec.j_max = psi.basis().j_max();
    rec.observables = fixed_cos != nullptr ? measure(psi, *fixed_cos, *fixed_cos2) : measure(psi);
    rec.coefficients.assign(psi.coefficients().data(),
                            psi.coefficients().data() + psi.coefficients().size());
    rec.basis_leak = report.basis_leak;
    rec.norm_drift = report.norm_drift;
  } catch (const NumericError& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.observables.kinetic_energy = kNaN;
    rec.observables.orientation = kNaN;
    rec.observables.alignment = kNaN;
  }
  return rec;
}

}  // namespace

std::vector<double> stepped_range(double first, double last, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError(fmt::format("range step must be finite and > 0, got {}", step));
  }
  if (!(last >= first)) {
    throw DomainError(fmt::format("range end {} is below its start {}", last, first));
  }
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-6)) + 1;
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = first + static_cast<double>(i) * step;
  }
  return values;
}

void SweepGrid::validate() const {
  require_increasing(strengths, "P");
  require_increasing(durations, "sigma");
  if (strengths.front() < 0.0) {
    throw DomainError(fmt::format("pulse strengths must be >= 0, got {}", strengths.front()));
  }
  if (durations.front() <= 0.0) {
    throw DomainError(fmt::format("pulse durations must be > 0, got {}", durations.front()));
  }
  if (j0 < 0) {
    throw DomainError(fmt::format("initial state J0 must be >= 0, got {}", j0));
  }
  if (const auto* fixed = std::get_if<FixedBasis>(&basis)) {
    if (fixed->j_max < 1 || j0 > fixed->j_max) {
      throw DomainError(
          fmt::format("fixed basis j_max={} cannot hold initial state J0={}", fixed->j_max, j0));
    }
  }
}

std::vector<double> SweepRecord::coefficient_magnitudes() const {
  std::vector<double> out(coefficients.size());
  std::transform(coefficients.begin(), coefficients.end(), out.begin(),
                 [](Complex c) { return std::abs(c); });
  return out;
}

std::vector<double> SweepResult::energy_row(std::size_t p_index) const {
  std::vector<double> row(grid.durations.size());
  for (std::size_t s = 0; s < row.size(); ++s) {
    row[s] = at(p_index, s).observables.kinetic_energy;
  }
  return row;
}

SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& options) {
  grid.validate();
  SweepResult result;
  result.grid = grid;
  result.records.resize(grid.size());

  std::optional<OperatorMatrix> cos_mat;
  std::optional<OperatorMatrix> cos2_mat;
  if (const auto* fixed = std::get_if<FixedBasis>(&grid.basis)) {
    cos_mat = build_cos_matrix(RotorBasis(fixed->j_max));
    cos2_mat = build_cos2_matrix(RotorBasis(fixed->j_max));
  }

  const std::size_t total = grid.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      const std::size_t ip = i / grid.durations.size();
      const std::size_t is = i % grid.durations.size();
      result.records[i] =
          evaluate_point(grid.strengths[ip], grid.durations[is], grid,
                         cos_mat ? &*cos_mat : nullptr, cos2_mat ? &*cos2_mat : nullptr);
    }
  };

  unsigned workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < total; ++i) {
    if (result.records[i].failed) result.failures.push_back(i);
  }

  if (grid.durations.size() >= 5) {
    for (std::size_t ip = 0; ip < grid.strengths.size(); ++ip) {
      const auto row = result.energy_row(ip);
      for (std::size_t is : detect_drop_indices(grid.durations, row, options.drop_threshold)) {
        result.drop_loci.push_back({grid.strengths[ip], grid.durations[is], row[is]});
      }
    }
  }

  if (result.is_surface()) {
    result.minima_2d = detect_surface_minima(result, options.minima_ceiling);
    result.minima_line_fit = fit_minima_line(result.minima_2d);
  }
  return result;
}

std::vector<std::size_t> detect_drop_indices(std::span<const double> durations,
                                             std::span<const double> energies,
                                             double threshold) {
  const std::size_t n = energies.size();
  if (durations.size() != n) {
    throw DomainError(fmt::format("drop detection got {} durations but {} energies",
                                  durations.size(), n));
  }
  if (n < 5) {
    throw DomainError(fmt::format("drop detection needs at least 5 points, got {}", n));
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError(fmt::format("drop threshold must lie in (0, 1), got {}", threshold));
  }
  const double step = durations[1] - durations[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs((durations[i + 1] - durations[i]) - step) > 1e-6 * std::abs(step)) {
      throw DomainError(fmt::format("drop detection needs a uniform grid (irregular at index {})", i));
    }
  }

  std::vector<std::size_t> drops;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double e = energies[i];
    if (!(e < energies[i - 1] && e < energies[i + 1])) continue;
    std::size_t left = i - 1;
    while (left > 0 && energies[left - 1] > energies[left]) --left;
    std::size_t right = i + 1;
    while (right + 1 < n && energies[right + 1] > energies[right]) ++right;
    const double reference = std::min(energies[left], energies[right]);
    if (reference > 0.0 && (reference - e) / reference > threshold) {
      drops.push_back(i);
    }
  }
  return drops;
}

std::vector<double> detect_drops(std::span<const double> durations,
                                 std::span<const double> energies, double threshold) {
  std::vector<double> out;
  for (std::size_t i : detect_drop_indices(durations, energies, threshold)) {
    out.push_back(durations[i]);
  }
  return out;
}

double percentile(std::span<const double> values, double q) {
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (finite.empty()) {
    throw DomainError("percentile of an empty set");
  }
  std::sort(finite.begin(), finite.end());
  const double rank = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(finite.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, finite.size() - 1);
  return finite[lo] + (rank - static_cast<double>(lo)) * (finite[hi] - finite[lo]);
}

std::vector<SurfacePoint> detect_surface_minima(const SweepResult& result,
                                                std::optional<double> ceiling) {
  const std::size_t np = result.grid.strengths.size();
  const std::size_t ns = result.grid.durations.size();
  if (np < 5 || ns < 5) {
    throw DomainError(fmt::format("surface minima need at least a 5x5 grid, got {}x{}", np, ns));
  }
  std::vector<double> energies(result.records.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    energies[i] = result.records[i].observables.kinetic_energy;
  }
  const double limit = ceiling.value_or(percentile(energies, 1.0));

  std::vector<SurfacePoint> minima;
  for (std::size_t ip = 1; ip + 1 < np; ++ip) {
    for (std::size_t is = 1; is + 1 < ns; ++is) {
      const double e = energies[result.grid.index(ip, is)];
      if (!(e < limit)) continue;
      bool lowest = true;
      for (int dp = -1; dp <= 1 && lowest; ++dp) {
        for (int ds = -1; ds <= 1; ++ds) {
          if (dp == 0 && ds == 0) continue;
          const double other = energies[result.grid.index(ip + dp, is + ds)];
          if (!(e < other)) {
            lowest = false;
            break;
          }
        }
      }
      if (lowest) {
        minima.push_back({result.grid.strengths[ip], result.grid.durations[is], e});
      }
    }
  }
  return minima;
}

int nearest_zero_locus_branch(double strength, double duration) {
  int best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  const int n_max = static_cast<int>(std::ceil(duration / std::numbers::pi)) + 2;
  for (int n = 1; n <= n_max; ++n) {
    const double root = analytic::zero_locus(0, strength, n);
    if (root < 0.0) continue;
    const double d = std::abs(duration - root);
    if (d < best_distance) {
      best_distance = d;
      best = n;
    }
  }
  return best;
}

double distance_to_zero_locus(double strength, double duration) {
  const int n = nearest_zero_locus_branch(strength, duration);
  if (n == 0) return std::numeric_limits<double>::infinity();
  return std::abs(duration - analytic::zero_locus(0, strength, n));
}

LineFit fit_minima_line(std::span<const SurfacePoint> minima) {
  LineFit fit;
  std::map<int, std::vector<SurfacePoint>> clusters;
  for (const auto& m : minima) {
    clusters[nearest_zero_locus_branch(m.strength, m.duration)].push_back(m);
  }

  double sxy = 0.0;
  double sxx = 0.0;
  std::vector<std::pair<int, std::pair<double, double>>> means;
  for (const auto& [branch, points] : clusters) {
    if (points.size() < 2) continue;
    double mp = 0.0;
    double ms = 0.0;
    for (const auto& p : points) {
      mp += p.strength;
      ms += p.duration;
    }
    mp /= static_cast<double>(points.size());
    ms /= static_cast<double>(points.size());
    for (const auto& p : points) {
      sxy += (p.strength - mp) * (p.duration - ms);
      sxx += (p.strength - mp) * (p.strength - mp);
    }
    means.push_back({branch, {mp, ms}});
  }

  if (means.empty()) {
    fit.status = "no cluster with at least two minima";
    return fit;
  }
  if (sxx == 0.0) {
    fit.status = "minima within every cluster share one pulse strength";
    return fit;
  }

  fit.ok = true;
  fit.status = "ok";
  fit.slope = sxy / sxx;
  double sq = 0.0;
  std::size_t used = 0;
  for (const auto& [branch, mean] : means) {
    const double intercept = mean.second - fit.slope * mean.first;
    const auto& points = clusters[branch];
    for (const auto& p : points) {
      const double r = p.duration - (fit.slope * p.strength + intercept);
      sq += r * r;
    }
    used += points.size();
    fit.lines.push_back({branch, intercept, points.size()});
  }
  fit.rms_residual = std::sqrt(sq / static_cast<double>(used));
  return fit;
}

std::vector<DropComparison> compare_drops_to_analytic(std::span<const double> drops,
                                                      double strength, int j0) {
  if (j0 != 0 && j0 != 1) {
    throw DomainError(fmt::format("analytic drop loci exist for J0 in {{0, 1}}, got {}", j0));
  }
  std::vector<DropComparison> out;
  for (double sigma : drops) {
    DropComparison cmp;
    cmp.sigma_drop = sigma;
    double best = std::numeric_limits<double>::infinity();
    const int n_max = static_cast<int>(std::ceil(2.0 * sigma / std::numbers::pi)) + 2;
    for (int n = 1; n <= n_max; ++n) {
      const double root = analytic::zero_locus(j0, strength, n);
      if (root < 0.0) continue;
      if (std::abs(sigma - root) < best) {
        best = std::abs(sigma - root);
        cmp.n = n;
        cmp.sigma_analytic = root;
      }
    }
    cmp.delta = cmp.n > 0 ? sigma - cmp.sigma_analytic : kNaN;
    cmp.matched = cmp.n > 0 && best <= 0.5;
    out.push_back(cmp);
  }
  return out;
}

}  // namespace rotor
