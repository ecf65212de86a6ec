#include "rotor/records.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "rotor/analytic.hpp"

#ifndef ROTOR_VERSION_STRING
#define ROTOR_VERSION_STRING "0.0.0"
#endif

namespace rotor::cli {
namespace {

using nlohmann::json;

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) {
    throw DomainError(fmt::format("not a number: '{}'", s));
  }
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError(fmt::format("write to '{}' failed", path.string()));
  }
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

RunMetadata make_metadata(const RunConfig& config) {
  RunMetadata meta;
  meta.config = config.resolved;
  meta.code_version = ROTOR_VERSION_STRING;
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  meta.timestamp = iso_utc(t);
  return meta;
}

std::vector<RecordRow> record_rows(const SweepResult& result) {
  int levels = 0;
  for (const auto& r : result.records) {
    if (!r.failed) levels = std::max(levels, static_cast<int>(r.coefficients.size()));
  }
  std::vector<RecordRow> rows;
  rows.reserve(result.records.size());
  for (const auto& r : result.records) {
    if (r.failed) continue;
    RecordRow row;
    row.strength = r.strength;
    row.duration = r.duration;
    row.j0 = result.grid.j0;
    row.energy = r.observables.kinetic_energy;
    row.orientation = r.observables.orientation;
    row.alignment = r.observables.alignment;
    row.populations = r.observables.populations;
    row.magnitudes = r.coefficient_magnitudes();
    row.populations.resize(levels, 0.0);
    row.magnitudes.resize(levels, 0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> csv_header(int levels) {
  std::vector<std::string> h{"P", "sigma", "j0", "energy", "orientation", "alignment"};
  for (int j = 0; j < levels; ++j) h.push_back(fmt::format("pop_{}", j));
  for (int j = 0; j < levels; ++j) h.push_back(fmt::format("c_abs_{}", j));
  return h;
}

void write_records_csv(const SweepResult& result, std::ostream& out) {
  const auto rows = record_rows(result);
  const int levels = rows.empty() ? 0 : static_cast<int>(rows.front().populations.size());
  out << fmt::format("{}\n", fmt::join(csv_header(levels), ","));
  for (const auto& row : rows) {
    out << format_double(row.strength) << ',' << format_double(row.duration) << ',' << row.j0
        << ',' << format_double(row.energy) << ',' << format_double(row.orientation) << ','
        << format_double(row.alignment);
    for (double p : row.populations) out << ',' << format_double(p);
    for (double m : row.magnitudes) out << ',' << format_double(m);
    out << '\n';
  }
}

std::vector<RecordRow> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv_line(line);
  if (header.size() < 6 || (header.size() - 6) % 2 != 0 || header[0] != "P") {
    throw DomainError("records CSV header is malformed");
  }
  const std::size_t levels = (header.size() - 6) / 2;
  std::vector<RecordRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DomainError(fmt::format("records CSV row has {} cells, header has {}", cells.size(),
                                    header.size()));
    }
    RecordRow row;
    row.strength = parse_double(cells[0]);
    row.duration = parse_double(cells[1]);
    row.j0 = std::stoi(cells[2]);
    row.energy = parse_double(cells[3]);
    row.orientation = parse_double(cells[4]);
    row.alignment = parse_double(cells[5]);
    for (std::size_t j = 0; j < levels; ++j) row.populations.push_back(parse_double(cells[6 + j]));
    for (std::size_t j = 0; j < levels; ++j) {
      row.magnitudes.push_back(parse_double(cells[6 + levels + j]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string records_json(const SweepResult& result, const RunMetadata& meta) {
  json doc;
  json cfg = json::object();
  for (const auto& [k, v] : meta.config) cfg[k] = v;
  doc["metadata"] = {{"config", cfg},
                     {"code_version", meta.code_version},
                     {"timestamp", meta.timestamp}};
  const auto rows = record_rows(result);
  const int levels = rows.empty() ? 0 : static_cast<int>(rows.front().populations.size());
  doc["columns"] = csv_header(levels);
  json records = json::array();
  for (const auto& row : rows) {
    json r = json::object();
    r["P"] = row.strength;
    r["sigma"] = row.duration;
    r["j0"] = row.j0;
    r["energy"] = row.energy;
    r["orientation"] = row.orientation;
    r["alignment"] = row.alignment;
    for (int j = 0; j < levels; ++j) r[fmt::format("pop_{}", j)] = row.populations[j];
    for (int j = 0; j < levels; ++j) r[fmt::format("c_abs_{}", j)] = row.magnitudes[j];
    records.push_back(std::move(r));
  }
  doc["records"] = std::move(records);
  json failures = json::array();
  for (std::size_t i : result.failures) {
    const auto& r = result.records[i];
    failures.push_back({{"P", r.strength}, {"sigma", r.duration}, {"reason", r.failure}});
  }
  doc["failures"] = std::move(failures);
  return doc.dump(1) + "\n";
}

std::vector<RecordRow> read_records_json(std::string_view text) {
  const json doc = json::parse(text);
  const auto& columns = doc.at("columns");
  const std::size_t levels = (columns.size() - 6) / 2;
  std::vector<RecordRow> rows;
  for (const auto& r : doc.at("records")) {
    RecordRow row;
    row.strength = r.at("P").get<double>();
    row.duration = r.at("sigma").get<double>();
    row.j0 = r.at("j0").get<int>();
    row.energy = r.at("energy").get<double>();
    row.orientation = r.at("orientation").get<double>();
    row.alignment = r.at("alignment").get<double>();
    for (std::size_t j = 0; j < levels; ++j) {
      row.populations.push_back(r.at(fmt::format("pop_{}", j)).get<double>());
    }
    for (std::size_t j = 0; j < levels; ++j) {
      row.magnitudes.push_back(r.at(fmt::format("c_abs_{}", j)).get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_drops_csv(const SweepResult& result, std::ostream& out) {
  out << "P,sigma,energy\n";
  for (const auto& d : result.drop_loci) {
    out << format_double(d.strength) << ',' << format_double(d.duration) << ','
        << format_double(d.kinetic_energy) << '\n';
  }
}

void write_drop_comparison_csv(const SweepResult& result, std::ostream& out) {
  out << "P,n,sigma_drop,sigma_analytic,delta,matched\n";
  if (result.grid.j0 > 1) return;
  for (double p : result.grid.strengths) {
    std::vector<double> drops;
    for (const auto& d : result.drop_loci) {
      if (d.strength == p) drops.push_back(d.duration);
    }
    for (const auto& c : compare_drops_to_analytic(drops, p, result.grid.j0)) {
      out << format_double(p) << ',' << c.n << ',' << format_double(c.sigma_drop) << ','
          << format_double(c.sigma_analytic) << ',' << format_double(c.delta) << ','
          << (c.matched ? 1 : 0) << '\n';
    }
  }
}

void write_minima_csv(const SweepResult& result, std::ostream& out) {
  out << "P,sigma,energy,branch,distance_to_locus\n";
  for (const auto& m : result.minima_2d) {
    out << format_double(m.strength) << ',' << format_double(m.duration) << ','
        << format_double(m.kinetic_energy) << ','
        << nearest_zero_locus_branch(m.strength, m.duration) << ','
        << format_double(distance_to_zero_locus(m.strength, m.duration)) << '\n';
  }
}

std::string minima_fit_json(const SweepResult& result) {
  json doc = json::object();
  if (!result.minima_line_fit) {
    doc["status"] = "not a surface sweep";
    return doc.dump(1) + "\n";
  }
  const LineFit& fit = *result.minima_line_fit;
  doc["ok"] = fit.ok;
  doc["status"] = fit.status;
  doc["slope"] = fit.slope;
  doc["rms_residual"] = fit.rms_residual;
  json lines = json::array();
  for (const auto& l : fit.lines) {
    lines.push_back({{"branch", l.branch}, {"intercept", l.intercept}, {"count", l.count}});
  }
  doc["lines"] = std::move(lines);
  return doc.dump(1) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const SweepResult& result,
                                                 const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create '{}': {}", config.output_dir.string(), ec.message()));
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& body) {
    const auto path = config.output_dir / name;
    auto out = open_for_write(path);
    body(out);
    finish(out, path);
    written.push_back(path);
  };

  if (config.wants(OutputFormat::kCsv)) {
    emit("records.csv", [&](std::ostream& o) { write_records_csv(result, o); });
    if (result.grid.durations.size() >= 5) {
      emit("drops.csv", [&](std::ostream& o) { write_drops_csv(result, o); });
      if (result.grid.j0 <= 1) {
        emit("drop_comparison.csv", [&](std::ostream& o) { write_drop_comparison_csv(result, o); });
      }
    }
    if (result.is_surface()) {
      emit("minima.csv", [&](std::ostream& o) { write_minima_csv(result, o); });
    }
    if (!result.failures.empty()) {
      emit("failures.csv", [&](std::ostream& o) {
        o << "P,sigma,reason\n";
        for (std::size_t i : result.failures) {
          const auto& r = result.records[i];
          o << format_double(r.strength) << ',' << format_double(r.duration) << ",\""
            << r.failure << "\"\n";
        }
      });
    }
  }
  if (config.wants(OutputFormat::kJson)) {
    const RunMetadata meta = make_metadata(config);
    emit("records.json", [&](std::ostream& o) { o << records_json(result, meta); });
    if (result.is_surface()) {
      emit("minima_fit.json", [&](std::ostream& o) { o << minima_fit_json(result); });
    }
  }
  return written;
}

}  // namespace rotor::cli
