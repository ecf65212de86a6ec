#include "rotor/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace rotor::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError(fmt::format("--config: cannot open '{}'", path));
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(fmt::format("{}:{}: expected key=value, got '{}'", path, lineno, t));
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    entries.emplace_back(key, trim(std::string_view(t).substr(eq + 1)));
  }
  return entries;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  if (s == "svg") return OutputFormat::kSvg;
  throw UsageError(fmt::format("--format: unknown format '{}' (expected csv, json, svg)", s));
}

PlotKind parse_plot(const std::string& s) {
  static const std::map<std::string, PlotKind> kinds{
      {"energy", PlotKind::kEnergyVsSigma},      {"coeffs", PlotKind::kCoeffsVsSigma},
      {"orientation", PlotKind::kOrientation},   {"alignment", PlotKind::kAlignment},
      {"surface", PlotKind::kSurfaceHeatmap},    {"polar", PlotKind::kPolarDensity},
  };
  const auto it = kinds.find(s);
  if (it == kinds.end()) {
    throw UsageError(fmt::format(
        "--plots: unknown plot '{}' (expected energy, coeffs, orientation, alignment, surface, polar)",
        s));
  }
  return it->second;
}

Method parse_method(const std::string& s) {
  if (s == "spectral") return Method::kSpectral;
  if (s == "ode") return Method::kOde;
  if (s == "kick") return Method::kKick;
  throw UsageError(fmt::format("--method: unknown method '{}' (expected spectral, ode, kick)", s));
}

std::string num(double v) { return fmt::format("{}", v); }

// Raw option values; interpreted after parsing.
struct RawOptions {
  double strength = 1.5;
  double p_min = 0.0, p_max = 0.0, p_step = 0.0;
  double sigma = 1.0;
  double sigma_min = 0.005, sigma_max = 10.0, sigma_step = 0.005;
  int j0 = 0;
  int j_max = 0;
  double leak_tol = 1e-10;
  std::string method = "spectral";
  int steps = 100000;
  int n_max = 4;
  std::string out = "rotor-out";
  std::string formats = "csv,json";
  std::string plots;
  int workers = 0;
  double drop_threshold = 0.1;
  std::uint64_t seed = 20240611;
  std::string criteria;
  std::string config_path;
};

struct Parser {
  CLI::App app{"Polar rigid rotor driven by a rectangular electric pulse", "rotorpulse"};
  RawOptions raw;
  CLI::App* propagate = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* analytic = nullptr;
  CLI::App* validate = nullptr;

  Parser() {
    app.require_subcommand(1);
    propagate = app.add_subcommand("propagate", "Propagate one initial state across one pulse");
    sweep = app.add_subcommand("sweep", "Sweep sigma (and optionally P) and detect drops");
    analytic = app.add_subcommand("analytic", "Two-level zero loci and coefficients");
    validate = app.add_subcommand("validate", "Run the acceptance checks");

    for (CLI::App* sub : {propagate, sweep, analytic, validate}) {
      sub->add_option("--config", raw.config_path, "Flat key=value file of option defaults");
      sub->add_option("--out", raw.out, "Output directory")->capture_default_str();
    }
    for (CLI::App* sub : {propagate, sweep, analytic}) {
      sub->add_option("--P", raw.strength, "Pulse strength P")->capture_default_str();
      sub->add_option("--j0", raw.j0, "Initial rotational state J0")->capture_default_str();
      sub->add_option("--format", raw.formats, "Comma list of csv,json,svg")->capture_default_str();
    }
    for (CLI::App* sub : {propagate, analytic}) {
      sub->add_option("--sigma", raw.sigma, "Pulse duration sigma")->capture_default_str();
    }
    for (CLI::App* sub : {propagate, sweep}) {
      sub->add_option("--j-max", raw.j_max, "Fixed basis size (omit for automatic)");
      sub->add_option("--leak-tol", raw.leak_tol, "Automatic basis leak tolerance")
          ->capture_default_str();
      sub->add_option("--plots", raw.plots,
                      "Comma list of energy,coeffs,orientation,alignment,surface,polar");
    }
    for (CLI::App* sub : {sweep, validate}) {
      sub->add_option("--workers", raw.workers, "Worker threads (0: all cores)")
          ->capture_default_str();
    }
    propagate->add_option("--method", raw.method, "spectral, ode or kick")->capture_default_str();
    propagate->add_option("--steps", raw.steps, "RK4 steps for --method ode")->capture_default_str();

    sweep->add_option("--P-min", raw.p_min, "First P of a 2-D sweep");
    sweep->add_option("--P-max", raw.p_max, "Last P of a 2-D sweep");
    sweep->add_option("--P-step", raw.p_step, "P step of a 2-D sweep");
    sweep->add_option("--sigma-min", raw.sigma_min, "First sigma")->capture_default_str();
    sweep->add_option("--sigma-max", raw.sigma_max, "Last sigma")->capture_default_str();
    sweep->add_option("--sigma-step", raw.sigma_step, "Sigma step")->capture_default_str();
    sweep->add_option("--drop-threshold", raw.drop_threshold, "Relative drop depth")
        ->capture_default_str();

    analytic->add_option("--n-max", raw.n_max, "Highest zero-locus order")->capture_default_str();

    validate->add_option("--seed", raw.seed, "Seed for sampled checks")->capture_default_str();
    validate->add_option("--criteria", raw.criteria, "Comma list of criterion numbers (default all)");
  }

  CLI::App* chosen() const {
    for (CLI::App* sub : {propagate, sweep, analytic, validate}) {
      if (sub->parsed()) return sub;
    }
    return nullptr;
  }
};

bool given(const CLI::App* sub, const char* name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::kPropagate: return "propagate";
    case Command::kSweep: return "sweep";
    case Command::kAnalytic: return "analytic";
    case Command::kValidate: return "validate";
  }
  return "?";
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kSvg: return "svg";
  }
  return "?";
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::kEnergyVsSigma: return "energy";
    case PlotKind::kCoeffsVsSigma: return "coeffs";
    case PlotKind::kOrientation: return "orientation";
    case PlotKind::kAlignment: return "alignment";
    case PlotKind::kSurfaceHeatmap: return "surface";
    case PlotKind::kPolarDensity: return "polar";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kSpectral: return "spectral";
    case Method::kOde: return "ode";
    case Method::kKick: return "kick";
  }
  return "?";
}

bool RunConfig::wants(OutputFormat f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

SweepGrid RunConfig::sweep_grid() const {
  SweepGrid grid;
  grid.strengths = strength_min ? stepped_range(*strength_min, *strength_max, *strength_step)
                                : std::vector<double>{strength};
  grid.durations = stepped_range(sigma_min, sigma_max, sigma_step);
  grid.j0 = j0;
  grid.basis = basis;
  return grid;
}

std::string usage_text() {
  Parser p;
  return p.app.help();
}

RunConfig parse_config(const std::vector<std::string>& args) {
  Parser p;
  if (args.empty()) {
    throw UsageError("no subcommand given\n" + p.app.help());
  }

  // Config-file keys become leading arguments unless the same flag is
  // already on the command line.
  std::vector<std::string> argv(args.begin(), args.end());
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
    if (path.empty()) continue;

    CLI::App* sub = p.app.get_subcommand_no_throw(args[0]);
    if (sub == nullptr) break;
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config_file(path)) {
      if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
        throw UsageError(fmt::format("{}: unknown key '{}' for subcommand '{}'", path, key, args[0]));
      }
      const std::string flag = "--" + key;
      const bool on_command_line = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
      });
      if (!on_command_line) {
        injected.push_back(flag);
        injected.push_back(value);
      }
    }
    argv.insert(argv.begin() + 1, injected.begin(), injected.end());
    break;
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    p.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    throw HelpRequested(p.chosen() ? p.chosen()->help() : p.app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(fmt::format("{}\n{}", e.what(), p.app.help()));
  }

  CLI::App* sub = p.chosen();
  const RawOptions& r = p.raw;
  RunConfig cfg;
  auto& res = cfg.resolved;
  res.emplace_back("command", sub->get_name());

  if (sub == p.propagate) cfg.command = Command::kPropagate;
  if (sub == p.sweep) cfg.command = Command::kSweep;
  if (sub == p.analytic) cfg.command = Command::kAnalytic;
  if (sub == p.validate) cfg.command = Command::kValidate;

  cfg.output_dir = r.out;
  require(!r.out.empty(), "--out must not be empty");

  if (cfg.command != Command::kValidate) {
    require(std::isfinite(r.strength) && r.strength >= 0.0,
            fmt::format("--P must be finite and >= 0, got {}", r.strength));
    require(r.j0 >= 0, fmt::format("--j0 must be >= 0, got {}", r.j0));
    cfg.strength = r.strength;
    cfg.j0 = r.j0;
    cfg.formats.clear();
    for (const auto& f : split_list(r.formats)) cfg.formats.push_back(parse_format(f));
    require(!cfg.formats.empty(), "--format must name at least one of csv, json, svg");
  }

  if (cfg.command == Command::kPropagate || cfg.command == Command::kAnalytic) {
    require(std::isfinite(r.sigma) && r.sigma > 0.0,
            fmt::format("--sigma must be finite and > 0, got {}", r.sigma));
    cfg.sigma = r.sigma;
  }

  if (cfg.command == Command::kPropagate || cfg.command == Command::kSweep) {
    const bool fixed = given(sub, "--j-max");
    require(!(fixed && given(sub, "--leak-tol")), "--j-max and --leak-tol are mutually exclusive");
    if (fixed) {
      require(r.j_max >= 1, fmt::format("--j-max must be >= 1, got {}", r.j_max));
      require(r.j0 <= r.j_max, fmt::format("--j-max {} is below --j0 {}", r.j_max, r.j0));
      cfg.basis = FixedBasis{r.j_max};
    } else {
      require(r.leak_tol > 0.0 && r.leak_tol < 1.0,
              fmt::format("--leak-tol must lie in (0, 1), got {}", r.leak_tol));
      cfg.basis = AutoBasis{r.leak_tol};
    }
    for (const auto& k : split_list(r.plots)) cfg.plots.push_back(parse_plot(k));
    if (!cfg.plots.empty() &&
        std::find(cfg.formats.begin(), cfg.formats.end(), OutputFormat::kSvg) == cfg.formats.end()) {
      cfg.formats.push_back(OutputFormat::kSvg);
    }
    if (cfg.wants(OutputFormat::kSvg) && cfg.plots.empty()) {
      cfg.plots = cfg.command == Command::kPropagate
                      ? std::vector<PlotKind>{PlotKind::kPolarDensity}
                      : std::vector<PlotKind>{PlotKind::kEnergyVsSigma, PlotKind::kCoeffsVsSigma,
                                              PlotKind::kOrientation, PlotKind::kAlignment};
    }
  }

  if (cfg.command == Command::kPropagate) {
    cfg.method = parse_method(r.method);
    require(r.steps >= 1000, fmt::format("--steps must be >= 1000, got {}", r.steps));
    cfg.steps = r.steps;
  }

  if (cfg.command == Command::kSweep) {
    require(r.sigma_step > 0.0 && std::isfinite(r.sigma_step),
            fmt::format("--sigma-step must be > 0, got {}", r.sigma_step));
    require(r.sigma_min > 0.0, fmt::format("--sigma-min must be > 0, got {}", r.sigma_min));
    require(r.sigma_max >= r.sigma_min,
            fmt::format("--sigma-max {} is below --sigma-min {}", r.sigma_max, r.sigma_min));
    cfg.sigma_min = r.sigma_min;
    cfg.sigma_max = r.sigma_max;
    cfg.sigma_step = r.sigma_step;

    const int range_flags = int(given(sub, "--P-min")) + int(given(sub, "--P-max")) +
                            int(given(sub, "--P-step"));
    require(range_flags == 0 || range_flags == 3,
            "--P-min, --P-max and --P-step must be given together");
    if (range_flags == 3) {
      require(!given(sub, "--P"), "--P conflicts with --P-min/--P-max/--P-step");
      require(r.p_step > 0.0, fmt::format("--P-step must be > 0, got {}", r.p_step));
      require(r.p_min >= 0.0, fmt::format("--P-min must be >= 0, got {}", r.p_min));
      require(r.p_max >= r.p_min, fmt::format("--P-max {} is below --P-min {}", r.p_max, r.p_min));
      cfg.strength_min = r.p_min;
      cfg.strength_max = r.p_max;
      cfg.strength_step = r.p_step;
    }
    require(r.drop_threshold > 0.0 && r.drop_threshold < 1.0,
            fmt::format("--drop-threshold must lie in (0, 1), got {}", r.drop_threshold));
    cfg.drop_threshold = r.drop_threshold;
  }

  if (cfg.command == Command::kSweep || cfg.command == Command::kValidate) {
    require(r.workers >= 0, fmt::format("--workers must be >= 0, got {}", r.workers));
    cfg.workers = static_cast<unsigned>(r.workers);
  }

  if (cfg.command == Command::kAnalytic) {
    require(r.j0 == 0 || r.j0 == 1, fmt::format("--j0 must be 0 or 1 for analytic, got {}", r.j0));
    require(r.n_max >= 1, fmt::format("--n-max must be >= 1, got {}", r.n_max));
    cfg.n_max = r.n_max;
  }

  if (cfg.command == Command::kValidate) {
    cfg.seed = r.seed;
    for (const auto& c : split_list(r.criteria)) {
      int id = 0;
      try {
        id = std::stoi(c);
      } catch (const std::exception&) {
        throw UsageError(fmt::format("--criteria: '{}' is not a number", c));
      }
      require(id >= 1 && id <= 11, fmt::format("--criteria: {} is not in 1..11", id));
      cfg.criteria.push_back(id);
    }
  }

  // Provenance echo in a fixed key order.
  switch (cfg.command) {
    case Command::kPropagate:
      res.emplace_back("P", num(cfg.strength));
      res.emplace_back("sigma", num(cfg.sigma));
      res.emplace_back("j0", num(cfg.j0));
      res.emplace_back("method", to_string(cfg.method));
      res.emplace_back("steps", num(cfg.steps));
      break;
    case Command::kSweep:
      if (cfg.strength_min) {
        res.emplace_back("P-min", num(*cfg.strength_min));
        res.emplace_back("P-max", num(*cfg.strength_max));
        res.emplace_back("P-step", num(*cfg.strength_step));
      } else {
        res.emplace_back("P", num(cfg.strength));
      }
      res.emplace_back("sigma-min", num(cfg.sigma_min));
      res.emplace_back("sigma-max", num(cfg.sigma_max));
      res.emplace_back("sigma-step", num(cfg.sigma_step));
      res.emplace_back("j0", num(cfg.j0));
      res.emplace_back("drop-threshold", num(cfg.drop_threshold));
      res.emplace_back("workers", num(cfg.workers));
      break;
    case Command::kAnalytic:
      res.emplace_back("P", num(cfg.strength));
      res.emplace_back("sigma", num(cfg.sigma));
      res.emplace_back("j0", num(cfg.j0));
      res.emplace_back("n-max", num(cfg.n_max));
      break;
    case Command::kValidate:
      res.emplace_back("seed", fmt::format("{}", cfg.seed));
      res.emplace_back("workers", num(cfg.workers));
      if (!cfg.criteria.empty()) {
        res.emplace_back("criteria", fmt::format("{}", fmt::join(cfg.criteria, ",")));
      }
      break;
  }
  if (cfg.command == Command::kPropagate || cfg.command == Command::kSweep) {
    if (const auto* fixed = std::get_if<FixedBasis>(&cfg.basis)) {
      res.emplace_back("j-max", num(fixed->j_max));
    } else {
      res.emplace_back("leak-tol", num(std::get<AutoBasis>(cfg.basis).leak_tol));
    }
    std::vector<std::string> plot_names;
    for (auto k : cfg.plots) plot_names.push_back(to_string(k));
    res.emplace_back("plots", fmt::format("{}", fmt::join(plot_names, ",")));
  }
  if (cfg.command != Command::kValidate) {
    std::vector<std::string> names;
    for (auto f : cfg.formats) names.push_back(to_string(f));
    res.emplace_back("format", fmt::format("{}", fmt::join(names, ",")));
  }
  res.emplace_back("out", cfg.output_dir.string());
  return cfg;
}

std::filesystem::path write_config_echo(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw UsageError(fmt::format("--out: cannot create '{}': {}", config.output_dir.string(),
                                 ec.message()));
  }
  const auto path = config.output_dir / "config.txt";
  std::ofstream out(path);
  for (const auto& [key, value] : config.resolved) {
    // The echo doubles as a --config file for the same subcommand.
    if (key == "command") {
      out << "# rotorpulse " << value << '\n';
    } else {
      out << key << '=' << value << '\n';
    }
  }
  if (!out) {
    throw UsageError(fmt::format("--out: cannot write '{}'", path.string()));
  }
  return path;
}

}  // namespace rotor::cli
