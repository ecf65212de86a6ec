#include "rotor/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "rotor/analytic.hpp"
#include "rotor/observables.hpp"
#include "rotor/propagator.hpp"
#include "rotor/sweep.hpp"

namespace rotor {
namespace {

constexpr double kPi = std::numbers::pi;

std::string list(std::span<const double> values, int precision = 4) {
  std::string s = "{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += fmt::format("{:.{}f}", values[i], precision);
  }
  return s + "}";
}

SweepResult duration_sweep(double strength, double first, double last, double step, int j0,
                           unsigned workers) {
  SweepGrid grid;
  grid.strengths = {strength};
  grid.durations = stepped_range(first, last, step);
  grid.j0 = j0;
  grid.basis = AutoBasis{};
  SweepOptions opts;
  opts.workers = workers;
  return run_sweep(grid, opts);
}

std::vector<double> drop_durations(const SweepResult& result) {
  std::vector<double> out;
  for (const auto& d : result.drop_loci) out.push_back(d.duration);
  return out;
}

// True when every expected value has a distinct measured partner within tol
// and nothing else was measured.
bool matches_within(std::span<const double> measured, std::span<const double> expected,
                    double tol) {
  if (measured.size() != expected.size()) return false;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (std::abs(measured[i] - expected[i]) > tol) return false;
  }
  return true;
}

}  // namespace

struct AcceptanceSuite::Cache {
  std::optional<SweepResult> drop_sweep;
};

AcceptanceSuite::AcceptanceSuite(AcceptanceOptions options)
    : options_(options), cache_(std::make_unique<Cache>()) {}

AcceptanceSuite::~AcceptanceSuite() = default;

CriterionResult AcceptanceSuite::run(int id) {
  auto drops_p15 = [&]() -> const std::vector<double> {
    if (!cache_->drop_sweep) {
      cache_->drop_sweep = duration_sweep(1.5, 0.005, 10.0, 0.005, 0, options_.workers);
    }
    return drop_durations(*cache_->drop_sweep);
  };

  CriterionResult r;
  r.id = id;
  switch (id) {
    case 1: {
      r.name = "drop positions at P = 1.5, J0 = 0";
      const std::vector<double> expected{3.044, 6.234, 9.393};
      const auto drops = drops_p15();
      r.passed = matches_within(drops, expected, 0.01);
      r.measured = list(drops, 3);
      r.expected = list(expected, 3) + " +/- 0.01";
      break;
    }
    case 2: {
      r.name = "closed-form zero loci at P = 1.5";
      const std::vector<double> e0{3.022, 6.224, 9.384};
      const std::vector<double> e1{1.523, 3.113, 4.693, 6.269};
      std::vector<double> m0, m1;
      for (const auto& z : analytic::zero_loci(0, 1.5, 3)) m0.push_back(z.sigma_exact);
      for (const auto& z : analytic::zero_loci(1, 1.5, 4)) m1.push_back(z.sigma_exact);
      r.passed = matches_within(m0, e0, 0.001) && matches_within(m1, e1, 0.001);
      r.measured = fmt::format("J0=0 {} J0=1 {}", list(m0), list(m1));
      r.expected = fmt::format("J0=0 {} J0=1 {} +/- 0.001", list(e0, 3), list(e1, 3));
      break;
    }
    case 3: {
      r.name = "root existence cutoff at P = 10";
      const double n1 = analytic::zero_locus(0, 10.0, 1);
      const double n2 = analytic::zero_locus(0, 10.0, 2);
      r.passed = n1 < 0.0 && n2 > 0.0;
      r.measured = fmt::format("n=1 {}, n=2 {}", n1 < 0.0 ? "absent" : fmt::format("{:.4f}", n1),
                               n2 < 0.0 ? "absent" : fmt::format("{:.4f}", n2));
      r.expected = "n=1 absent, n=2 present";
      break;
    }
    case 4: {
      r.name = "impulsive limit at sigma = 0.005";
      double worst_pop = 0.0;
      double worst_ratio = 0.0;
      for (double p : {0.5, 1.5, 3.0}) {
        for (int j0 : {0, 1, 2}) {
          const PulseSpec pulse(p, 0.005);
          const auto report = propagate_converged(pulse, j0);
          const Wavepacket kick = delta_kick(p, j0, report.final_state.basis());
          const auto pop_full = populations(report.final_state);
          const auto pop_kick = populations(kick);
          for (std::size_t j = 0; j < pop_full.size(); ++j) {
            worst_pop = std::max(worst_pop, std::abs(pop_full[j] - pop_kick[j]));
          }
          if (j0 == 0) {
            const double target = 2.0 * p * p / 3.0;
            worst_ratio = std::max(
                worst_ratio, std::abs(kinetic_energy(report.final_state) - target) / target);
          }
        }
      }
      r.passed = worst_pop < 1e-3 && worst_ratio < 0.01;
      r.measured = fmt::format("max |dpop| {:.2e}, max energy rel. error {:.2e}", worst_pop,
                               worst_ratio);
      r.expected = "max |dpop| < 1e-3, energy rel. error < 1e-2";
      break;
    }
    case 5: {
      r.name = "adiabatic limit at sigma = 10, P = 1.5";
      bool ok = true;
      std::string measured;
      for (int j0 : {0, 1, 2}) {
        const auto report = propagate_converged(PulseSpec(1.5, 10.0), j0);
        const double pop = std::norm(report.final_state[j0]);
        const double energy = kinetic_energy(report.final_state);
        ok = ok && pop > 0.99 && std::abs(energy - j0 * (j0 + 1.0)) < 0.05;
        measured += fmt::format("{}J0={}: pop {:.4f}, E {:.4f}", measured.empty() ? "" : "; ",
                                j0, pop, energy);
      }
      r.passed = ok;
      r.measured = measured;
      r.expected = "pop > 0.99, |E - J0(J0+1)| < 0.05";
      break;
    }
    case 6: {
      r.name = "orientation and alignment at the P = 1.5 drops";
      const auto drops = drops_p15();
      double worst_orient = 0.0;
      double worst_align = 0.0;
      for (int j0 : {0, 1, 2}) {
        for (double s : drops) {
          const auto report = propagate_converged(PulseSpec(1.5, s), j0);
          const auto obs = measure(report.final_state);
          worst_orient = std::max(worst_orient, std::abs(obs.orientation));
          worst_align =
              std::max(worst_align, std::abs(obs.alignment - field_free_alignment(j0)));
        }
      }
      r.passed = !drops.empty() && worst_orient < 0.02 && worst_align < 0.05;
      r.measured = fmt::format("{} drops, max |<cos>| {:.4f}, max |<cos^2> - ref| {:.4f}",
                               drops.size(), worst_orient, worst_align);
      r.expected = "|<cos>| < 0.02, |<cos^2> - ref| < 0.05";
      break;
    }
    case 7: {
      r.name = "spectral vs RK4 on 20 random points";
      std::mt19937_64 rng(options_.seed);
      std::uniform_real_distribution<double> p_dist(0.0, 10.0);
      std::uniform_real_distribution<double> s_dist(0.01, 10.0);
      double worst_diff = 0.0;
      double worst_drift = 0.0;
      for (int k = 0; k < 20; ++k) {
        const PulseSpec pulse(p_dist(rng), s_dist(rng));
        const RotorBasis basis = converge_basis(pulse, 0);
        const auto spectral = propagate_spectral(pulse, 0, basis);
        const auto ode = propagate_ode(pulse, 0, basis, kDefaultRk4Steps);
        const auto& a = spectral.final_state.coefficients();
        const auto& b = ode.final_state.coefficients();
        worst_diff = std::max(worst_diff, (a - b).cwiseAbs().maxCoeff());
        worst_drift = std::max(worst_drift, spectral.norm_drift);
      }
      r.passed = worst_diff < 1e-8 && worst_drift < 1e-12;
      r.measured = fmt::format("max |dC| {:.2e}, max norm drift {:.2e}", worst_diff, worst_drift);
      r.expected = "max |dC| < 1e-8, norm drift < 1e-12";
      break;
    }
    case 8: {
      r.name = "two-level model fidelity";
      double worst_amp = 0.0;
      for (double p : {0.5, 1.5}) {
        for (double s : stepped_range(2.0, 10.0, 0.01)) {
          const PulseSpec pulse(p, s);
          const auto report = propagate_converged(pulse, 0);
          const double full = std::abs(report.final_state[1]);
          const double two = std::abs(analytic::coefficient_c1_of_0(pulse));
          worst_amp = std::max(worst_amp, std::abs(full - two));
        }
      }
      double worst_drop = 0.0;
      bool paired = true;
      std::string drops_text;
      for (double p : {3.0, 5.0}) {
        const auto sweep = duration_sweep(p, 0.005, 10.0, 0.005, 0, options_.workers);
        std::vector<double> full;
        for (double d : drop_durations(sweep)) {
          if (d >= 2.0) full.push_back(d);
        }
        std::vector<double> two;
        for (const auto& z : analytic::zero_loci(0, p, 8)) {
          if (z.sigma_exact >= 2.0 && z.sigma_exact <= 10.0) two.push_back(z.sigma_exact);
        }
        if (full.size() != two.size()) paired = false;
        for (std::size_t i = 0; i < std::min(full.size(), two.size()); ++i) {
          worst_drop = std::max(worst_drop, std::abs(full[i] - two[i]));
        }
        drops_text += fmt::format("{}P={}: full {} two-level {}", drops_text.empty() ? "" : "; ",
                                  p, list(full, 3), list(two, 3));
      }
      r.passed = worst_amp < 0.02 && paired && worst_drop < 0.1;
      r.measured = fmt::format("max ||C1| diff| {:.4f}, max drop offset {:.3f} ({})", worst_amp,
                               worst_drop, drops_text);
      r.expected = "||C1| diff| < 0.02 for P in {0.5, 1.5}; drop offsets < 0.1 for P in {3, 5}";
      break;
    }
    case 9: {
      r.name = "transition symmetry |C^m_n| = |C^n_m|";
      double worst = 0.0;
      for (double s : {3.0, 6.0}) {
        const PulseSpec pulse(1.5, s);
        const RotorBasis basis = converge_basis(pulse, 3);
        std::vector<Wavepacket> out;
        for (int m = 0; m <= 3; ++m) out.push_back(propagate_spectral(pulse, m, basis).final_state);
        for (int m = 0; m <= 3; ++m) {
          for (int n = 0; n <= 3; ++n) {
            worst = std::max(worst, std::abs(std::abs(out[m][n]) - std::abs(out[n][m])));
          }
        }
      }
      r.passed = worst < 1e-10;
      r.measured = fmt::format("max asymmetry {:.2e}", worst);
      r.expected = "< 1e-10";
      break;
    }
    case 10: {
      r.name = "surface minima on the zero-locus parabolas";
      SweepGrid grid;
      grid.strengths = stepped_range(0.5, 10.0, 0.05);
      grid.durations = stepped_range(0.5, 10.0, 0.05);
      grid.j0 = 0;
      grid.basis = AutoBasis{};
      SweepOptions opts;
      opts.workers = options_.workers;
      const auto result = run_sweep(grid, opts);
      const double step_tol = 2 * 0.05 + 1e-9;
      std::size_t off = 0;
      double worst = 0.0;
      for (const auto& m : result.minima_2d) {
        const double d = distance_to_zero_locus(m.strength, m.duration);
        worst = std::max(worst, d);
        if (!(d <= step_tol)) ++off;
      }
      const LineFit fit = result.minima_line_fit.value_or(LineFit{});
      r.passed = !result.minima_2d.empty() && off == 0 && fit.ok &&
                 std::abs(fit.slope - 0.577) <= 0.05;
      r.measured = fmt::format("{} minima, {} off-parabola (worst {:.3f}), slope {:.3f} [{}]",
                               result.minima_2d.size(), off, worst, fit.slope, fit.status);
      r.expected = "all minima within 0.1 of a parabola, slope 0.577 +/- 0.05";
      break;
    }
    case 11: {
      r.name = "drop spacing at P = 1.5";
      const auto drops = drops_p15();
      std::vector<double> gaps;
      for (std::size_t i = 1; i < drops.size(); ++i) gaps.push_back(drops[i] - drops[i - 1]);
      r.passed = !gaps.empty() && std::all_of(gaps.begin(), gaps.end(), [](double g) {
        return g > kPi - 0.15 && g < kPi;
      });
      r.measured = list(gaps, 3);
      r.expected = fmt::format("each in ({:.3f}, {:.3f})", kPi - 0.15, kPi);
      break;
    }
    default:
      throw DomainError(fmt::format("criterion id must be in 1..{}, got {}", kCriterionCount, id));
  }
  return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all(std::span<const int> ids) {
  std::vector<int> order(ids.begin(), ids.end());
  if (order.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) order.push_back(i);
  }
  std::vector<CriterionResult> results;
  for (int id : order) results.push_back(run(id));
  return results;
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids,
                                            const AcceptanceOptions& options) {
  AcceptanceSuite suite(options);
  return suite.run_all(ids);
}

std::string format_criterion(const CriterionResult& result) {
  return fmt::format("{}  [{:2}] {}  measured: {}  expected: {}", result.passed ? "PASS" : "FAIL",
                     result.id, result.name, result.measured, result.expected);
}

std::string format_report(std::span<const CriterionResult> results) {
  std::string out;
  std::size_t passed = 0;
  for (const auto& r : results) {
    out += format_criterion(r);
    out += '\n';
    if (r.passed) ++passed;
  }
  out += fmt::format("{} of {} criteria passed\n", passed, results.size());
  return out;
}

bool all_passed(std::span<const CriterionResult> results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.passed; });
}

}  // namespace rotor
