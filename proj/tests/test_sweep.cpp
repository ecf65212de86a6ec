#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "rotor/analytic.hpp"
#include "rotor/sweep.hpp"

using namespace rotor;

namespace {

constexpr double kPi = std::numbers::pi;

SweepResult sigma_sweep(double p, double first, double last, double step, int j0,
                        unsigned workers = 1) {
  SweepGrid grid;
  grid.strengths = {p};
  grid.durations = stepped_range(first, last, step);
  grid.j0 = j0;
  SweepOptions opts;
  opts.workers = workers;
  return run_sweep(grid, opts);
}

}  // namespace

TEST(SteppedRange, ComputesFromIndex) {
  const auto r = stepped_range(0.005, 10.0, 0.005);
  ASSERT_EQ(r.size(), 2000u);
  EXPECT_EQ(r[608], 0.005 + 608 * 0.005);
  EXPECT_NEAR(r.back(), 10.0, 1e-12);
  EXPECT_EQ(stepped_range(1.0, 1.0, 0.5).size(), 1u);
  EXPECT_THROW(stepped_range(0.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(stepped_range(2.0, 1.0, 0.1), DomainError);
}

TEST(SweepGrid, Validation) {
  SweepGrid g;
  EXPECT_THROW(g.validate(), DomainError);
  g.strengths = {1.0};
  g.durations = {0.5, 0.4};
  EXPECT_THROW(g.validate(), DomainError);
  g.durations = {0.0, 1.0};
  EXPECT_THROW(g.validate(), DomainError);
  g.durations = {0.5, 1.0};
  g.strengths = {-1.0};
  EXPECT_THROW(g.validate(), DomainError);
  g.strengths = {1.0};
  g.j0 = 4;
  g.basis = FixedBasis{3};
  EXPECT_THROW(g.validate(), DomainError);
  g.basis = FixedBasis{9};
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.index(0, 1), 1u);
}

TEST(DropDetection, FindsDeepDipsOnly) {
  const auto x = stepped_range(0.1, 3.0, 0.1);
  std::vector<double> e(x.size(), 1.0);
  e[5] = 0.2;   // deep
  e[15] = 0.95; // shallow: 5 % below its shoulders
  e[22] = 0.5;
  const auto drops = detect_drops(x, e, 0.1);
  ASSERT_EQ(drops.size(), 2u);
  EXPECT_DOUBLE_EQ(drops[0], x[5]);
  EXPECT_DOUBLE_EQ(drops[1], x[22]);
  EXPECT_EQ(detect_drops(x, e, 0.04).size(), 3u);
}

TEST(DropDetection, MonotoneSeriesHasNoDrops) {
  const auto x = stepped_range(0.1, 5.0, 0.1);
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(v * v);
    down.push_back(std::exp(-v));
  }
  EXPECT_TRUE(detect_drops(x, up).empty());
  EXPECT_TRUE(detect_drops(x, down).empty());
}

TEST(DropDetection, RejectsBadInput) {
  const std::vector<double> four{1, 2, 3, 4};
  EXPECT_THROW(detect_drops(four, four), DomainError);
  const std::vector<double> x{1, 2, 3, 4, 6};
  const std::vector<double> e{1, 0, 1, 0, 1};
  EXPECT_THROW(detect_drops(x, e), DomainError);
  const std::vector<double> xu{1, 2, 3, 4, 5};
  EXPECT_THROW(detect_drops(xu, e, 0.0), DomainError);
  EXPECT_THROW(detect_drops(xu, e, 1.0), DomainError);
  EXPECT_THROW(detect_drops(xu, four), DomainError);
}

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v{4, 1, 3, 2, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_DOUBLE_EQ(percentile(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 4.0);
  EXPECT_DOUBLE_EQ(percentile(v, 50), 2.5);
  EXPECT_THROW(percentile(std::vector<double>{}, 50), DomainError);
}

TEST(Sweep, DropsAtPublishedDurations) {
  const auto r = sigma_sweep(1.5, 0.005, 10.0, 0.005, 0);
  std::vector<double> drops;
  for (const auto& d : r.drop_loci) drops.push_back(d.duration);
  ASSERT_EQ(drops.size(), 3u);
  const double expected[] = {3.044, 6.234, 9.393};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(drops[i], expected[i], 0.01);

  // The grid point nearest 3.044 is the lowest energy in [2.5, 3.5].
  const auto row = r.energy_row(0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double s = r.grid.durations[i];
    if (s >= 2.5 && s <= 3.5 && (best == 0 || row[i] < row[best])) best = i;
  }
  EXPECT_NEAR(r.grid.durations[best], 3.045, 1e-9);
}

TEST(Sweep, ZeroStrengthRowKeepsInitialEnergy) {
  for (int j0 : {0, 1, 2}) {
    const auto r = sigma_sweep(0.0, 0.5, 5.0, 0.5, j0);
    for (double e : r.energy_row(0)) EXPECT_DOUBLE_EQ(e, j0 * (j0 + 1.0));
    EXPECT_TRUE(r.drop_loci.empty());
  }
}

TEST(Sweep, ResultsIndependentOfWorkerCount) {
  SweepGrid grid;
  grid.strengths = stepped_range(0.5, 3.0, 0.5);
  grid.durations = stepped_range(0.1, 4.0, 0.1);
  SweepOptions one, many;
  one.workers = 1;
  many.workers = 4;
  const auto a = run_sweep(grid, one);
  const auto b = run_sweep(grid, many);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].coefficients, b.records[i].coefficients);
    EXPECT_EQ(a.records[i].observables.kinetic_energy, b.records[i].observables.kinetic_energy);
  }
  EXPECT_EQ(a.drop_loci.size(), b.drop_loci.size());
  EXPECT_EQ(a.minima_2d.size(), b.minima_2d.size());
}

TEST(Sweep, FailedPointsAreMarkedNotFatal) {
  SweepGrid grid;
  grid.strengths = {0.5, 20.0};
  grid.durations = {0.5, 1.0};
  grid.basis = AutoBasis{1e-10, 8};
  const auto r = run_sweep(grid);
  ASSERT_FALSE(r.failures.empty());
  for (std::size_t i : r.failures) {
    EXPECT_TRUE(r.records[i].failed);
    EXPECT_FALSE(r.records[i].failure.empty());
    EXPECT_TRUE(std::isnan(r.records[i].observables.kinetic_energy));
  }
  EXPECT_FALSE(r.at(0, 0).failed);
}

TEST(Sweep, FixedBasisIsUsedAsGiven) {
  SweepGrid grid;
  grid.strengths = {1.0};
  grid.durations = {1.0};
  grid.basis = FixedBasis{12};
  const auto r = run_sweep(grid);
  EXPECT_EQ(r.records[0].j_max, 12);
  EXPECT_EQ(r.records[0].coefficients.size(), 13u);
}

TEST(DropComparison, WeakPulseDropsSitOnTheLoci) {
  const auto r = sigma_sweep(0.1, 0.005, 10.0, 0.005, 0);
  std::vector<double> drops;
  for (const auto& d : r.drop_loci) drops.push_back(d.duration);
  const auto cmp = compare_drops_to_analytic(drops, 0.1, 0);
  ASSERT_EQ(cmp.size(), 3u);
  for (const auto& c : cmp) {
    EXPECT_TRUE(c.matched);
    EXPECT_LT(std::abs(c.delta), 0.005);
  }
  EXPECT_THROW(compare_drops_to_analytic(drops, 0.1, 2), DomainError);
}

TEST(DropComparison, OffsetsAtModeratePulse) {
  const auto r = sigma_sweep(1.5, 0.005, 10.0, 0.005, 0);
  std::vector<double> drops;
  for (const auto& d : r.drop_loci) drops.push_back(d.duration);
  const auto cmp = compare_drops_to_analytic(drops, 1.5, 0);
  ASSERT_EQ(cmp.size(), 3u);
  // Full-model drops lie slightly above the two-level roots.
  const double expected[] = {0.022, 0.010, 0.009};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(cmp[i].n, i + 1);
    EXPECT_NEAR(cmp[i].delta, expected[i], 0.006);
  }
}

TEST(DropComparison, J1CoefficientMinimaNearLoci) {
  // |C_2| of the full model from J0 = 1 has its minima close to sigma^1_n.
  const auto r = sigma_sweep(1.5, 0.005, 7.0, 0.005, 1);
  std::vector<double> mags;
  for (const auto& rec : r.records) mags.push_back(std::abs(rec.coefficients[2]));
  const auto minima = detect_drops(r.grid.durations, mags, 0.5);
  const auto loci = analytic::zero_loci(1, 1.5, 4);
  ASSERT_EQ(minima.size(), loci.size());
  for (std::size_t i = 0; i < loci.size(); ++i) {
    EXPECT_NEAR(minima[i], loci[i].sigma_exact, 0.1) << i;
  }
}

TEST(ZeroLocusGeometry, NearestBranchAndDistance) {
  EXPECT_EQ(nearest_zero_locus_branch(1.5, 3.1), 1);
  EXPECT_EQ(nearest_zero_locus_branch(1.5, 6.0), 2);
  EXPECT_NEAR(distance_to_zero_locus(1.5, 3.0), std::abs(3.0 - analytic::zero_locus(0, 1.5, 1)),
              1e-14);
  EXPECT_EQ(nearest_zero_locus_branch(1e6, 1.0), 0);
  EXPECT_TRUE(std::isinf(distance_to_zero_locus(1e6, 1.0)));
}

TEST(LineFit, RecoversSyntheticSlope) {
  std::vector<SurfacePoint> pts;
  const double slope = 0.577;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 5; ++k) {
      const double p = 0.5 + 0.1 * k;
      pts.push_back({p, n * kPi + slope * (p - 0.5), 0.0});
    }
  }
  const auto fit = fit_minima_line(pts);
  ASSERT_TRUE(fit.ok) << fit.status;
  EXPECT_NEAR(fit.slope, slope, 1e-12);
  EXPECT_LT(fit.rms_residual, 1e-12);
  ASSERT_EQ(fit.lines.size(), 3u);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_EQ(fit.lines[n - 1].branch, n);
    EXPECT_NEAR(fit.lines[n - 1].intercept, n * kPi - slope * 0.5, 1e-12);
  }
}

TEST(LineFit, DegenerateInputsReportStatus) {
  EXPECT_FALSE(fit_minima_line({}).ok);
  const std::vector<SurfacePoint> same_p{{1.0, 3.0, 0.0}, {1.0, 3.1, 0.0}};
  const auto fit = fit_minima_line(same_p);
  EXPECT_FALSE(fit.ok);
  EXPECT_FALSE(fit.status.empty());
}

TEST(SurfaceMinima, FoundOnSmallSurface) {
  SweepGrid grid;
  grid.strengths = stepped_range(0.5, 3.0, 0.1);
  grid.durations = stepped_range(2.0, 4.0, 0.05);
  SweepOptions opts;
  opts.workers = 2;
  opts.minima_ceiling = 1e-3;
  const auto r = run_sweep(grid, opts);
  ASSERT_TRUE(r.is_surface());
  for (const auto& m : r.minima_2d) {
    EXPECT_LT(m.kinetic_energy, 1e-3);
    EXPECT_GT(m.strength, grid.strengths.front());
    EXPECT_LT(m.strength, grid.strengths.back());
  }
  EXPECT_TRUE(r.minima_line_fit.has_value());
}
