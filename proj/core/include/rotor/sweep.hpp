#pragma once

// Parallel (P, sigma) sweeps with kinetic-energy drop detection, surface
// minima and their comparison with the two-level zero loci.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rotor/observables.hpp"
#include "rotor/rotor_core.hpp"

namespace rotor {

struct FixedBasis {
  int j_max = 9;
};

struct AutoBasis {
  double leak_tol = 1e-10;
  int j_max_cap = 400;
};

using BasisPolicy = std::variant<AutoBasis, FixedBasis>;

/// first, first + step, ... up to `last` (inclusive within step/1e6).
/// Values are computed as first + i * step so they do not accumulate error.
std::vector<double> stepped_range(double first, double last, double step);

struct SweepGrid {
  std::vector<double> strengths;
  std::vector<double> durations;
  int j0 = 0;
  BasisPolicy basis = AutoBasis{};

  /// Throws DomainError on empty or non-increasing axes, P < 0, sigma <= 0,
  /// J0 < 0, or a fixed basis that does not contain J0.
  void validate() const;
  std::size_t size() const { return strengths.size() * durations.size(); }
  std::size_t index(std::size_t p_index, std::size_t sigma_index) const {
    return p_index * durations.size() + sigma_index;
  }
};

struct SweepRecord {
  double strength = 0.0;
  double duration = 0.0;
  int j_max = 0;
  ObservableSet observables;
  std::vector<Complex> coefficients;
  double basis_leak = 0.0;
  double norm_drift = 0.0;
  bool failed = false;
  std::string failure;

  std::vector<double> coefficient_magnitudes() const;
};

struct SurfacePoint {
  double strength = 0.0;
  double duration = 0.0;
  double kinetic_energy = 0.0;
};

struct ClusterLine {
  /// Index n of the zero-locus branch the cluster belongs to.
  int branch = 0;
  double intercept = 0.0;
  std::size_t count = 0;
};

struct LineFit {
  bool ok = false;
  std::string status;
  /// d sigma / d P shared by all clusters.
  double slope = 0.0;
  std::vector<ClusterLine> lines;
  double rms_residual = 0.0;
};

struct SweepResult {
  SweepGrid grid;
  /// Row-major over (P, sigma): records[grid.index(ip, is)].
  std::vector<SweepRecord> records;
  std::vector<SurfacePoint> drop_loci;
  std::vector<SurfacePoint> minima_2d;
  std::optional<LineFit> minima_line_fit;
  /// Indices of records whose basis did not converge.
  std::vector<std::size_t> failures;

  const SweepRecord& at(std::size_t p_index, std::size_t sigma_index) const {
    return records[grid.index(p_index, sigma_index)];
  }
  /// Kinetic energies along sigma at one strength; NaN for failed points.
  std::vector<double> energy_row(std::size_t p_index) const;
  bool is_surface() const { return grid.strengths.size() >= 5 && grid.durations.size() >= 5; }
};

struct SweepOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  double drop_threshold = 0.1;
  /// Absolute energy ceiling for surface minima; default is the 1st percentile.
  std::optional<double> minima_ceiling;
};

/// Propagates every grid point (spectral method), measures the observables
/// and, when the grid allows it, detects drops per strength row and 2-D
/// minima. Records are assembled by grid index, so results do not depend on
/// the number of workers.
SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& options = {});

/// Indices of strict local minima whose depth below the lower of the two
/// enclosing local maxima exceeds `threshold` (relative). Requires at least
/// five points on a uniform grid.
std::vector<std::size_t> detect_drop_indices(std::span<const double> durations,
                                             std::span<const double> energies,
                                             double threshold = 0.1);

std::vector<double> detect_drops(std::span<const double> durations,
                                 std::span<const double> energies, double threshold = 0.1);

/// Linear-interpolated percentile (q in [0, 100]) of the finite values.
double percentile(std::span<const double> values, double q);

/// Interior grid points lower than all eight neighbours and strictly below
/// `ceiling` (default: 1st percentile of the surface).
std::vector<SurfacePoint> detect_surface_minima(const SweepResult& result,
                                                std::optional<double> ceiling = std::nullopt);

/// Index n of the J0 = 0 zero-locus branch sigma_n(P) closest to (P, sigma),
/// or 0 if none exists at this P.
int nearest_zero_locus_branch(double strength, double duration);

/// |sigma - sigma_n(P)| to the nearest J0 = 0 branch (infinity if none).
double distance_to_zero_locus(double strength, double duration);

/// Groups minima by nearest branch and fits sigma = slope * P + c_n by least
/// squares with one slope shared across groups of two or more points.
LineFit fit_minima_line(std::span<const SurfacePoint> minima);

struct DropComparison {
  int n = 0;
  double sigma_drop = 0.0;
  double sigma_analytic = 0.0;
  /// sigma_drop - sigma_analytic.
  double delta = 0.0;
  /// False when no root lies within 0.5 of the drop.
  bool matched = false;
};

std::vector<DropComparison> compare_drops_to_analytic(std::span<const double> drops,
                                                      double strength, int j0);

}  // namespace rotor
