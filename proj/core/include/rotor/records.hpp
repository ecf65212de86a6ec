#pragma once

// CSV / JSON serialization of sweep results. Floats are written with 17
// significant digits so that reading them back is lossless.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rotor/config.hpp"
#include "rotor/sweep.hpp"

namespace rotor::cli {

std::string format_double(double value);

struct RunMetadata {
  std::vector<std::pair<std::string, std::string>> config;
  std::string code_version;
  /// ISO-8601 UTC; taken from SOURCE_DATE_EPOCH when set.
  std::string timestamp;
};

RunMetadata make_metadata(const RunConfig& config);

/// One CSV/JSON row: P,sigma,j0,energy,orientation,alignment,pop_0..pop_K,c_abs_0..c_abs_K.
struct RecordRow {
  double strength = 0.0;
  double duration = 0.0;
  int j0 = 0;
  double energy = 0.0;
  double orientation = 0.0;
  double alignment = 0.0;
  std::vector<double> populations;
  std::vector<double> magnitudes;

  friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

/// Rows of all non-failed records, padded with zeros to the largest basis.
std::vector<RecordRow> record_rows(const SweepResult& result);

std::vector<std::string> csv_header(int levels);

void write_records_csv(const SweepResult& result, std::ostream& out);
std::string records_json(const SweepResult& result, const RunMetadata& meta);

std::vector<RecordRow> read_records_csv(std::istream& in);
std::vector<RecordRow> read_records_json(std::string_view text);

void write_drops_csv(const SweepResult& result, std::ostream& out);
void write_drop_comparison_csv(const SweepResult& result, std::ostream& out);
void write_minima_csv(const SweepResult& result, std::ostream& out);
std::string minima_fit_json(const SweepResult& result);

/// Writes every requested data file (records, drops, drop comparison,
/// minima, fit, failures) into config.output_dir and returns the paths.
/// SVG figures are handled by emit_plots.
std::vector<std::filesystem::path> write_outputs(const SweepResult& result,
                                                 const RunConfig& config);

/// I/O failure while writing results; carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rotor::cli
