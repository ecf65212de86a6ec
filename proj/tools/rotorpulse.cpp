// rotorpulse: propagate | sweep | analytic | validate

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "rotor/acceptance.hpp"
#include "rotor/analytic.hpp"
#include "rotor/config.hpp"
#include "rotor/observables.hpp"
#include "rotor/plots.hpp"
#include "rotor/propagator.hpp"
#include "rotor/records.hpp"
#include "rotor/sweep.hpp"

namespace {

using namespace rotor;
using namespace rotor::cli;

void print_written(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) fmt::print("wrote {}\n", p.string());
}

SweepRecord to_record(const PulseSpec& pulse, const Wavepacket& psi, double norm_drift) {
  SweepRecord rec;
  rec.strength = pulse.strength();
  rec.duration = pulse.duration();
  rec.j_max = psi.basis().j_max();
  rec.observables = measure(psi);
  rec.coefficients.assign(psi.coefficients().data(),
                          psi.coefficients().data() + psi.coefficients().size());
  rec.basis_leak = basis_leak(psi);
  rec.norm_drift = norm_drift;
  return rec;
}

int run_propagate(const RunConfig& cfg) {
  const PulseSpec pulse(cfg.strength, cfg.sigma);
  const RotorBasis basis = std::visit(
      [&](const auto& policy) -> RotorBasis {
        using T = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<T, FixedBasis>) {
          return RotorBasis(policy.j_max);
        } else if (cfg.method == Method::kKick) {
          return RotorBasis(cfg.j0 + delta_kick_padding(cfg.strength) + 8);
        } else {
          return converge_basis(pulse, cfg.j0, BasisSearch{policy.leak_tol, policy.j_max_cap, 4});
        }
      },
      cfg.basis);

  std::optional<PropagationReport> report;
  std::optional<Wavepacket> psi;
  switch (cfg.method) {
    case Method::kSpectral:
      report = propagate_spectral(pulse, cfg.j0, basis);
      break;
    case Method::kOde:
      report = propagate_ode(pulse, cfg.j0, basis, cfg.steps);
      break;
    case Method::kKick:
      psi = delta_kick(cfg.strength, cfg.j0, basis);
      break;
  }
  if (report) psi = report->final_state;
  if (report && report->has_warning) fmt::print(stderr, "warning: {}\n", report->warning);

  const auto obs = measure(*psi);
  fmt::print("P = {}  sigma = {}  J0 = {}  j_max = {}  method = {}\n", pulse.strength(),
             pulse.duration(), cfg.j0, basis.j_max(), to_string(cfg.method));
  fmt::print("kinetic energy  {:.12g}\n", obs.kinetic_energy);
  fmt::print("orientation     {:.12g}\n", obs.orientation);
  fmt::print("alignment       {:.12g}\n", obs.alignment);
  fmt::print("norm defect     {:.3e}\n", psi->norm_defect());
  fmt::print("basis leak      {:.3e}\n", basis_leak(*psi));
  for (int j = 0; j < static_cast<int>(obs.populations.size()) && j <= cfg.j0 + 8; ++j) {
    const Complex c = (*psi)[j];
    fmt::print("  J={:<3} |C|^2 = {:.10f}  C = {:+.10f}{:+.10f}i\n", j, obs.populations[j],
               c.real(), c.imag());
  }

  SweepResult result;
  result.grid.strengths = {pulse.strength()};
  result.grid.durations = {pulse.duration()};
  result.grid.j0 = cfg.j0;
  result.grid.basis = FixedBasis{basis.j_max()};
  result.records.push_back(to_record(pulse, *psi, report ? report->norm_drift : psi->norm_defect()));

  auto written = write_outputs(result, cfg);
  if (cfg.wants(OutputFormat::kSvg)) {
    std::vector<PlotKind> kinds;
    for (PlotKind k : cfg.plots) {
      if (k == PlotKind::kPolarDensity) kinds.push_back(k);
    }
    if (kinds.empty()) kinds.push_back(PlotKind::kPolarDensity);
    const auto svgs = emit_plots(result, kinds, cfg.output_dir);
    written.insert(written.end(), svgs.begin(), svgs.end());
  }
  written.push_back(write_config_echo(cfg));
  print_written(written);
  return kExitOk;
}

int run_sweep_command(const RunConfig& cfg) {
  SweepOptions opts;
  opts.workers = cfg.workers;
  opts.drop_threshold = cfg.drop_threshold;
  const SweepResult result = run_sweep(cfg.sweep_grid(), opts);

  fmt::print("{} points, {} failed\n", result.records.size(), result.failures.size());
  for (std::size_t ip = 0; ip < result.grid.strengths.size() && ip < 8; ++ip) {
    const double p = result.grid.strengths[ip];
    std::vector<double> drops;
    for (const auto& d : result.drop_loci) {
      if (d.strength == p) drops.push_back(d.duration);
    }
    fmt::print("P = {:<8} drops at sigma = {:.6g}\n", p, fmt::join(drops, ", "));
  }
  if (result.minima_line_fit) {
    const auto& fit = *result.minima_line_fit;
    fmt::print("{} surface minima; shared slope {:.4f} ({})\n", result.minima_2d.size(), fit.slope,
               fit.status);
  }

  auto written = write_outputs(result, cfg);
  if (cfg.wants(OutputFormat::kSvg)) {
    const auto svgs = emit_plots(result, cfg.plots, cfg.output_dir);
    written.insert(written.end(), svgs.begin(), svgs.end());
  }
  written.push_back(write_config_echo(cfg));
  print_written(written);
  return result.failures.empty() ? kExitOk : kExitNumeric;
}

int run_analytic(const RunConfig& cfg) {
  const PulseSpec pulse(cfg.strength, cfg.sigma);
  fmt::print("two-level model, J0 = {}, P = {}\n", cfg.j0, cfg.strength);
  fmt::print("root existence threshold: every order exists for P < {:.6f}\n",
             analytic::existence_threshold(cfg.j0));
  fmt::print("{:>3}  {:>14}  {:>14}\n", "n", "sigma_n", "sigma_n taylor");
  std::string csv = "j0,P,n,sigma_exact,sigma_taylor\n";
  for (int n = 1; n <= cfg.n_max; ++n) {
    const double exact = analytic::zero_locus(cfg.j0, cfg.strength, n);
    if (exact < 0.0) {
      fmt::print("{:>3}  {:>14}\n", n, "no root");
      continue;
    }
    const auto loci = analytic::zero_loci(cfg.j0, cfg.strength, n);
    const auto& z = loci.back();
    fmt::print("{:>3}  {:>14.6f}  {:>14.6f}\n", n, z.sigma_exact, z.sigma_taylor);
    csv += fmt::format("{},{},{},{},{}\n", cfg.j0, format_double(cfg.strength), n,
                       format_double(z.sigma_exact), format_double(z.sigma_taylor));
  }
  const Complex c = cfg.j0 == 0 ? analytic::coefficient_c1_of_0(pulse)
                                : analytic::coefficient_c2_of_1(pulse);
  fmt::print("at sigma = {}: C_{}^{} = {:+.10f}{:+.10f}i  |C| = {:.10f}\n", cfg.sigma, cfg.j0 + 1,
             cfg.j0, c.real(), c.imag(), std::abs(c));

  if (cfg.wants(OutputFormat::kCsv)) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = cfg.output_dir / "zero_loci.csv";
    std::ofstream out(path, std::ios::binary);
    out << csv;
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
    fmt::print("wrote {}\n", path.string());
    fmt::print("wrote {}\n", write_config_echo(cfg).string());
  }
  return kExitOk;
}

int run_validate(const RunConfig& cfg) {
  AcceptanceOptions opts;
  opts.workers = cfg.workers;
  opts.seed = cfg.seed;
  AcceptanceSuite suite(opts);
  std::vector<int> ids = cfg.criteria;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  }
  std::vector<CriterionResult> results;
  for (int id : ids) {
    results.push_back(suite.run(id));
    fmt::print("{}\n", format_criterion(results.back()));
    std::fflush(stdout);
  }
  const std::size_t passed =
      std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  fmt::print("{} of {} criteria passed\n", passed, results.size());
  return all_passed(results) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const RunConfig cfg = parse_config(args);
    switch (cfg.command) {
      case Command::kPropagate: return run_propagate(cfg);
      case Command::kSweep: return run_sweep_command(cfg);
      case Command::kAnalytic: return run_analytic(cfg);
      case Command::kValidate: return run_validate(cfg);
    }
  } catch (const HelpRequested& help) {
    fmt::print("{}", help.what());
    return kExitOk;
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kExitUsage;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric failure: {}\n", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o failure: {}\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
