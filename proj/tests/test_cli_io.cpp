#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rotor/config.hpp"
#include "rotor/plots.hpp"
#include "rotor/records.hpp"
#include "rotor/svg.hpp"

using namespace rotor;
using namespace rotor::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rotorpulse-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepResult small_sweep(int j0 = 0) {
  SweepGrid grid;
  grid.strengths = {1.5};
  grid.durations = stepped_range(0.5, 4.0, 0.05);
  grid.j0 = j0;
  SweepOptions opts;
  opts.workers = 1;
  return run_sweep(grid, opts);
}

#ifdef ROTORPULSE_PATH
int run_tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("SOURCE_DATE_EPOCH=1700000000 \"") + ROTORPULSE_PATH +
                          "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(ParseConfig, DefaultsForSweep) {
  const auto cfg = parse_config({"sweep"});
  EXPECT_EQ(cfg.command, Command::kSweep);
  EXPECT_EQ(cfg.strength, 1.5);
  EXPECT_EQ(cfg.sigma_min, 0.005);
  EXPECT_EQ(cfg.sigma_max, 10.0);
  EXPECT_TRUE(std::holds_alternative<AutoBasis>(cfg.basis));
  EXPECT_TRUE(cfg.wants(OutputFormat::kCsv));
  EXPECT_FALSE(cfg.wants(OutputFormat::kSvg));
  EXPECT_EQ(cfg.sweep_grid().durations.size(), 2000u);
}

TEST(ParseConfig, FlagsAndRanges) {
  const auto cfg = parse_config({"sweep", "--P-min", "0.5", "--P-max", "1.0", "--P-step", "0.25",
                                 "--j-max", "12", "--plots", "energy,surface"});
  EXPECT_EQ(cfg.sweep_grid().strengths.size(), 3u);
  ASSERT_TRUE(std::holds_alternative<FixedBasis>(cfg.basis));
  EXPECT_EQ(std::get<FixedBasis>(cfg.basis).j_max, 12);
  EXPECT_TRUE(cfg.wants(OutputFormat::kSvg));
  ASSERT_EQ(cfg.plots.size(), 2u);
  EXPECT_EQ(cfg.plots[1], PlotKind::kSurfaceHeatmap);
}

TEST(ParseConfig, UsageErrorsNameTheKey) {
  auto message = [](std::vector<std::string> args) -> std::string {
    try {
      parse_config(args);
    } catch (const UsageError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message({"sweep", "--sigma-step", "0"}).find("--sigma-step"), std::string::npos);
  EXPECT_NE(message({"sweep", "--j-max", "8", "--leak-tol", "1e-8"}).find("--j-max"),
            std::string::npos);
  EXPECT_NE(message({"sweep", "--P-min", "1"}).find("--P-min"), std::string::npos);
  EXPECT_NE(message({"propagate", "--steps", "10"}).find("--steps"), std::string::npos);
  EXPECT_NE(message({"analytic", "--j0", "2"}).find("--j0"), std::string::npos);
  EXPECT_NE(message({"propagate", "--method", "magic"}).find("magic"), std::string::npos);
  EXPECT_FALSE(message({"frobnicate"}).empty());
  EXPECT_FALSE(message({}).empty());
  EXPECT_THROW(parse_config({"sweep", "--help"}), HelpRequested);
}

TEST(ParseConfig, ConfigFileWithCommandLineOverride) {
  const auto dir = scratch("config");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# comment\nP = 2.5\nsigma-max=3\n\nj0=1\n";
  const auto cfg = parse_config({"sweep", "--config", file.string(), "--P", "0.75"});
  EXPECT_EQ(cfg.strength, 0.75);
  EXPECT_EQ(cfg.sigma_max, 3.0);
  EXPECT_EQ(cfg.j0, 1);
}

TEST(ParseConfig, ConfigFileUnknownKeyRejected) {
  const auto dir = scratch("badkey");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "colour=blue\n";
  try {
    parse_config({"sweep", "--config", file.string()});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  EXPECT_THROW(parse_config({"sweep", "--config", (dir / "missing.cfg").string()}), UsageError);
}

TEST(ParseConfig, ConfigEchoReparsesToSameConfig) {
  const auto dir = scratch("echo");
  auto cfg = parse_config({"sweep", "--P", "0.5", "--sigma-step", "0.01", "--out", dir.string()});
  const auto echo = write_config_echo(cfg);
  const auto again = parse_config({"sweep", "--config", echo.string()});
  EXPECT_EQ(again.resolved, cfg.resolved);
}

TEST(Records, CsvRoundTripIsBitExact) {
  const auto result = small_sweep();
  std::stringstream ss;
  write_records_csv(result, ss);
  const auto rows = read_records_csv(ss);
  EXPECT_EQ(rows, record_rows(result));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[3].energy, result.records[3].observables.kinetic_energy);
}

TEST(Records, JsonRoundTripIsBitExact) {
  const auto result = small_sweep(1);
  RunMetadata meta{{{"P", "1.5"}}, "test", "2024-01-01T00:00:00Z"};
  const auto text = records_json(result, meta);
  EXPECT_EQ(read_records_json(text), record_rows(result));
  EXPECT_NE(text.find("\"code_version\""), std::string::npos);
}

TEST(Records, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310, 3.0449999999999999}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Records, MalformedCsvRejected) {
  std::stringstream bad("x,y\n1,2\n");
  EXPECT_THROW(read_records_csv(bad), DomainError);
  std::stringstream short_row("P,sigma,j0,energy,orientation,alignment\n1,2,0\n");
  EXPECT_THROW(read_records_csv(short_row), DomainError);
}

TEST(Plots, EmptyResultRejected) {
  SweepResult empty;
  EXPECT_THROW(render_plot(empty, PlotKind::kEnergyVsSigma), DomainError);
}

TEST(Plots, SurfaceNeedsAGrid) {
  const auto result = small_sweep();
  try {
    render_plot(result, PlotKind::kSurfaceHeatmap);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("surface"), std::string::npos);
  }
}

TEST(Plots, LinePlotsAreStandaloneSvg) {
  const auto result = small_sweep();
  for (PlotKind k : {PlotKind::kEnergyVsSigma, PlotKind::kCoeffsVsSigma, PlotKind::kOrientation,
                     PlotKind::kAlignment, PlotKind::kPolarDensity}) {
    const auto svg = render_plot(result, k);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos) << to_string(k);
  }
}

TEST(Svg, EscapesAndColormap) {
  EXPECT_EQ(svg::escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
  EXPECT_EQ(svg::colormap(0.0).hex(), "#440154");
  EXPECT_EQ(svg::colormap(1.0).hex(), "#fde725");
  EXPECT_EQ(svg::colormap(-3.0).hex(), "#440154");
}

#ifdef ROTORPULSE_PATH

TEST(Tool, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(run_tool("analytic --P 1.5 --out " + dir.string(), dir / "a.log"), 0);
  EXPECT_EQ(run_tool("sweep --sigma-step -1", dir / "b.log"), 1);
  EXPECT_EQ(run_tool("nonsense", dir / "c.log"), 1);
  // No basis below the automatic cap holds this kick.
  EXPECT_EQ(run_tool("propagate --P 1000 --sigma 0.001 --out " + dir.string(), dir / "d.log"), 2);
  EXPECT_EQ(run_tool("validate --criteria 3 --out " + dir.string(), dir / "e.log"), 0);
  EXPECT_EQ(run_tool("validate --criteria 99", dir / "f.log"), 1);
  EXPECT_EQ(run_tool("propagate --P 1 --sigma 1 --method ode --steps 1000 --out " + dir.string(),
                     dir / "g.log"),
            0);
}

TEST(Tool, RepeatedRunsAreByteIdentical) {
  const auto out = scratch("repeat");
  const auto first = scratch("repeat-first");
  const std::string args =
      " --P 1.5 --sigma-min 0.5 --sigma-max 6 --sigma-step 0.05 --workers 2 --format csv,json,svg";
  ASSERT_EQ(run_tool("sweep" + args + " --out " + out.string(), first / "run.log"), 0);
  for (const auto& entry : fs::directory_iterator(out)) {
    fs::copy_file(entry.path(), first / entry.path().filename());
  }
  // Second run from the echoed configuration into the same directory.
  ASSERT_EQ(run_tool("sweep --config " + (first / "config.txt").string(), first / "rerun.log"), 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(fs::exists(first / name)) << name;
    EXPECT_EQ(slurp(entry.path()), slurp(first / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 8u);
}

TEST(Tool, SweepCsvHasDropNearPublishedDuration) {
  const auto dir = scratch("fig");
  ASSERT_EQ(run_tool("sweep --P 1.5 --format csv --out " + dir.string(), dir / "run.log"), 0);
  std::ifstream in(dir / "records.csv");
  const auto rows = read_records_csv(in);
  double best_sigma = 0.0, best = 1e9;
  for (const auto& r : rows) {
    if (r.duration >= 2.5 && r.duration <= 3.5 && r.energy < best) {
      best = r.energy;
      best_sigma = r.duration;
    }
  }
  EXPECT_NEAR(best_sigma, 3.045, 1e-9);
  EXPECT_TRUE(fs::exists(dir / "drops.csv"));
}

#endif
