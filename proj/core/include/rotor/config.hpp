#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rotor/sweep.hpp"

namespace rotor::cli {

/// Bad command line or config file; the message names the offending key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for --help; carries the help text. Not an error.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kPropagate, kSweep, kAnalytic, kValidate };
enum class OutputFormat { kCsv, kJson, kSvg };
enum class PlotKind {
  kEnergyVsSigma,
  kCoeffsVsSigma,
  kOrientation,
  kAlignment,
  kSurfaceHeatmap,
  kPolarDensity,
};
enum class Method { kSpectral, kOde, kKick };

std::string to_string(Command c);
std::string to_string(OutputFormat f);
std::string to_string(PlotKind k);
std::string to_string(Method m);

/// Exit codes of the rotorpulse tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitValidation = 3;

struct RunConfig {
  Command command = Command::kSweep;

  double strength = 1.5;
  std::optional<double> strength_min;
  std::optional<double> strength_max;
  std::optional<double> strength_step;

  double sigma = 1.0;
  double sigma_min = 0.005;
  double sigma_max = 10.0;
  double sigma_step = 0.005;

  int j0 = 0;
  BasisPolicy basis = AutoBasis{};
  Method method = Method::kSpectral;
  int steps = 100000;
  int n_max = 4;

  std::filesystem::path output_dir = "rotor-out";
  std::vector<OutputFormat> formats{OutputFormat::kCsv, OutputFormat::kJson};
  std::vector<PlotKind> plots;
  unsigned workers = 0;
  double drop_threshold = 0.1;
  std::uint64_t seed = 20240611;
  std::vector<int> criteria;

  /// Fully resolved key=value pairs, in a fixed order, for provenance.
  std::vector<std::pair<std::string, std::string>> resolved;

  bool wants(OutputFormat f) const;
  SweepGrid sweep_grid() const;
};

/// Parses `args` (without the program name). `--config FILE` loads a flat
/// key=value file whose keys are long option names; flags given on the
/// command line override file keys. Unknown keys and out-of-range values
/// raise UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

std::string usage_text();

/// Writes `config.txt` (key=value, one per line) into the output directory.
std::filesystem::path write_config_echo(const RunConfig& config);

}  // namespace rotor::cli
