#include "rotor/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "rotor/observables.hpp"
#include "rotor/records.hpp"
#include "rotor/svg.hpp"

namespace rotor::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr std::size_t kMaxRows = 8;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

// Maps data coordinates into the plotting frame.
struct Frame {
  Range x, y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const {
    return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom);
  }
};

void draw_axes(svg::Document& doc, const Frame& f, std::string_view title,
               std::string_view xlabel, std::string_view ylabel) {
  doc.rect(0, 0, kWidth, kHeight, "white");
  doc.rect(kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom, "none", "#333333", 1.0);
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x.lo + i * (f.x.hi - f.x.lo) / 5.0;
    const double yv = f.y.lo + i * (f.y.hi - f.y.lo) / 5.0;
    doc.line(f.px(xv), kHeight - kBottom, f.px(xv), kHeight - kBottom + 5, "#333333");
    doc.text(f.px(xv), kHeight - kBottom + 18, fmt::format("{:.3g}", xv), 11, "middle");
    doc.line(kLeft - 5, f.py(yv), kLeft, f.py(yv), "#333333");
    doc.text(kLeft - 8, f.py(yv) + 4, fmt::format("{:.3g}", yv), 11, "end");
  }
  doc.text(kWidth / 2, 24, title, 15, "middle");
  doc.text(kWidth / 2, kHeight - 12, xlabel, 13, "middle");
  doc.text(18, kHeight / 2, ylabel, 13, "middle", -90);
}

void require_records(const SweepResult& result) {
  if (result.records.empty()) throw DomainError("plot requested for an empty result");
}

// Row indices to draw: up to kMaxRows strengths spread over the grid.
std::vector<std::size_t> plotted_rows(const SweepResult& result) {
  const std::size_t n = result.grid.strengths.size();
  std::vector<std::size_t> rows;
  if (n <= kMaxRows) {
    for (std::size_t i = 0; i < n; ++i) rows.push_back(i);
  } else {
    for (std::size_t k = 0; k < kMaxRows; ++k) rows.push_back(k * (n - 1) / (kMaxRows - 1));
  }
  return rows;
}

template <class Value>
std::string line_plot(const SweepResult& result, std::string_view title, std::string_view ylabel,
                      Value value, bool mark_drops, std::optional<double> reference = {}) {
  require_records(result);
  const auto rows = plotted_rows(result);
  Frame f;
  for (double s : result.grid.durations) f.x.include(s);
  for (std::size_t ip : rows) {
    for (std::size_t is = 0; is < result.grid.durations.size(); ++is) {
      const auto& r = result.at(ip, is);
      if (!r.failed) f.y.include(value(r));
    }
  }
  if (reference) f.y.include(*reference);
  f.x.pad();
  f.y.pad();

  svg::Document doc(kWidth, kHeight);
  draw_axes(doc, f, title, "sigma", ylabel);
  if (reference) {
    doc.line(kLeft, f.py(*reference), kWidth - kRight, f.py(*reference), "#777777", 1.0, "6,4");
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t ip = rows[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t is = 0; is < result.grid.durations.size(); ++is) {
      const auto& r = result.at(ip, is);
      const double v = r.failed ? std::numeric_limits<double>::quiet_NaN() : value(r);
      if (!std::isfinite(v)) {
        if (pts.size() > 1) doc.polyline(pts, colour);
        pts.clear();
        continue;
      }
      pts.emplace_back(f.px(r.duration), f.py(v));
    }
    if (pts.size() > 1) {
      doc.polyline(pts, colour);
    } else if (pts.size() == 1) {
      doc.circle(pts[0].first, pts[0].second, 3, colour);
    }
    doc.text(kWidth - kRight - 8, kTop + 16 + 15 * k,
             fmt::format("P = {:.4g}", result.grid.strengths[ip]), 11, "end");
    doc.line(kWidth - kRight - 110, kTop + 12 + 15 * k, kWidth - kRight - 90, kTop + 12 + 15 * k,
             colour, 2.0);
    if (mark_drops) {
      for (const auto& d : result.drop_loci) {
        if (d.strength != result.grid.strengths[ip]) continue;
        for (std::size_t is = 0; is < result.grid.durations.size(); ++is) {
          const auto& r = result.at(ip, is);
          if (r.duration == d.duration && !r.failed) {
            doc.circle(f.px(r.duration), f.py(value(r)), 4, "none", colour);
          }
        }
      }
    }
  }
  return doc.str();
}

std::string coeffs_plot(const SweepResult& result) {
  require_records(result);
  const std::size_t ip = 0;
  std::size_t levels = 0;
  for (const auto& r : result.records) {
    if (!r.failed) levels = std::max(levels, r.coefficients.size());
  }
  if (levels == 0) throw DomainError("coefficient plot needs at least one converged record");
  levels = std::min(levels, kMaxRows);

  Frame f;
  for (double s : result.grid.durations) f.x.include(s);
  f.y.include(0.0);
  f.y.include(1.0);
  f.x.pad();
  f.y.pad();
  svg::Document doc(kWidth, kHeight);
  draw_axes(doc, f,
            fmt::format("|C_J| after the pulse, P = {:.4g}, J0 = {}", result.grid.strengths[ip],
                        result.grid.j0),
            "sigma", "|C_J|");
  for (std::size_t j = 0; j < levels; ++j) {
    const char* colour = kPalette[j % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t is = 0; is < result.grid.durations.size(); ++is) {
      const auto& r = result.at(ip, is);
      if (r.failed) continue;
      const double m = j < r.coefficients.size() ? std::abs(r.coefficients[j]) : 0.0;
      pts.emplace_back(f.px(r.duration), f.py(m));
    }
    if (pts.size() > 1) doc.polyline(pts, colour);
    doc.text(kWidth - kRight - 8, kTop + 16 + 15 * j, fmt::format("J = {}", j), 11, "end");
    doc.line(kWidth - kRight - 80, kTop + 12 + 15 * j, kWidth - kRight - 60, kTop + 12 + 15 * j,
             colour, 2.0);
  }
  return doc.str();
}

std::string surface_plot(const SweepResult& result) {
  require_records(result);
  if (!result.is_surface()) {
    throw DomainError("surface heatmap needs a (P, sigma) grid of at least 5 x 5 points");
  }
  const auto& g = result.grid;
  Frame f;
  const double dp = g.strengths.size() > 1 ? g.strengths[1] - g.strengths[0] : 1.0;
  const double ds = g.durations.size() > 1 ? g.durations[1] - g.durations[0] : 1.0;
  f.x.include(g.strengths.front() - dp / 2);
  f.x.include(g.strengths.back() + dp / 2);
  f.y.include(g.durations.front() - ds / 2);
  f.y.include(g.durations.back() + ds / 2);

  Range z;
  for (const auto& r : result.records) {
    if (!r.failed && r.observables.kinetic_energy > 0) z.include(std::log10(r.observables.kinetic_energy));
  }
  if (!z.valid()) throw DomainError("surface heatmap needs positive kinetic energies");
  z.lo = std::max(z.lo, z.hi - 8.0);

  svg::Document doc(kWidth, kHeight);
  draw_axes(doc, f, fmt::format("log10 kinetic energy, J0 = {}", g.j0), "P", "sigma");
  const double cw = std::abs(f.px(dp) - f.px(0.0)) + 0.5;
  const double ch = std::abs(f.py(ds) - f.py(0.0)) + 0.5;
  for (std::size_t ip = 0; ip < g.strengths.size(); ++ip) {
    for (std::size_t is = 0; is < g.durations.size(); ++is) {
      const auto& r = result.at(ip, is);
      std::string fill = "#bbbbbb";
      if (!r.failed && r.observables.kinetic_energy > 0) {
        const double t = (std::log10(r.observables.kinetic_energy) - z.lo) / (z.hi - z.lo);
        fill = svg::colormap(t).hex();
      }
      doc.rect(f.px(g.strengths[ip] - dp / 2), f.py(g.durations[is] + ds / 2), cw, ch, fill);
    }
  }
  for (const auto& m : result.minima_2d) {
    doc.circle(f.px(m.strength), f.py(m.duration), 3.5, "white", "black");
  }
  return doc.str();
}

std::string polar_plot(const SweepResult& result) {
  require_records(result);
  const SweepRecord* chosen = nullptr;
  if (!result.drop_loci.empty()) {
    const auto& d = result.drop_loci.front();
    for (const auto& r : result.records) {
      if (!r.failed && r.strength == d.strength && r.duration == d.duration) {
        chosen = &r;
        break;
      }
    }
  }
  if (!chosen) {
    const auto& mid = result.records[result.records.size() / 2];
    if (!mid.failed) chosen = &mid;
  }
  if (!chosen) {
    for (const auto& r : result.records) {
      if (!r.failed) {
        chosen = &r;
        break;
      }
    }
  }
  if (!chosen) throw DomainError("polar density needs at least one converged record");

  const int dim = static_cast<int>(chosen->coefficients.size());
  const Wavepacket psi(RotorBasis(dim - 1),
                       Eigen::Map<const ComplexVector>(chosen->coefficients.data(), dim),
                       result.grid.j0);

  constexpr int kSamples = 361;
  std::vector<double> theta(kSamples);
  for (int i = 0; i < kSamples; ++i) theta[i] = std::numbers::pi * i / (kSamples - 1);
  const auto rho = angular_density(psi, theta);
  const double peak = std::max(*std::max_element(rho.begin(), rho.end()), 1e-300);

  svg::Document doc(kHeight, kHeight);
  doc.rect(0, 0, kHeight, kHeight, "white");
  const double cx = kHeight / 2, cy = kHeight / 2 + 10, radius = kHeight / 2 - 50;
  for (int k = 1; k <= 4; ++k) {
    std::vector<std::pair<double, double>> ring;
    for (int i = 0; i <= 72; ++i) {
      const double a = 2 * std::numbers::pi * i / 72;
      ring.emplace_back(cx + radius * k / 4 * std::sin(a), cy - radius * k / 4 * std::cos(a));
    }
    doc.polyline(ring, "#dddddd", 1.0);
  }
  doc.line(cx, cy - radius, cx, cy + radius, "#999999", 1.0, "4,3");
  // The density is axially symmetric, so the lobe is mirrored about the field axis.
  std::vector<std::pair<double, double>> outline;
  for (int i = 0; i < kSamples; ++i) {
    const double r = radius * rho[i] / peak;
    outline.emplace_back(cx + r * std::sin(theta[i]), cy - r * std::cos(theta[i]));
  }
  for (int i = kSamples - 1; i >= 0; --i) {
    const double r = radius * rho[i] / peak;
    outline.emplace_back(cx - r * std::sin(theta[i]), cy - r * std::cos(theta[i]));
  }
  doc.polygon(outline, "#1f77b4", "#0b3d66", 0.45);
  doc.text(kHeight / 2, 24,
           fmt::format("angular density, P = {:.4g}, sigma = {:.4g}", chosen->strength,
                       chosen->duration),
           14, "middle");
  doc.text(cx + 6, cy - radius - 6, "field axis", 11);
  return doc.str();
}

}  // namespace

std::string plot_file_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::kEnergyVsSigma: return "energy_vs_sigma.svg";
    case PlotKind::kCoeffsVsSigma: return "coeffs_vs_sigma.svg";
    case PlotKind::kOrientation: return "orientation_vs_sigma.svg";
    case PlotKind::kAlignment: return "alignment_vs_sigma.svg";
    case PlotKind::kSurfaceHeatmap: return "energy_surface.svg";
    case PlotKind::kPolarDensity: return "polar_density.svg";
  }
  return "plot.svg";
}

std::string render_plot(const SweepResult& result, PlotKind kind) {
  switch (kind) {
    case PlotKind::kEnergyVsSigma:
      return line_plot(
          result, fmt::format("kinetic energy after the pulse, J0 = {}", result.grid.j0),
          "<J^2>", [](const SweepRecord& r) { return r.observables.kinetic_energy; }, true);
    case PlotKind::kCoeffsVsSigma:
      return coeffs_plot(result);
    case PlotKind::kOrientation:
      return line_plot(
          result, fmt::format("orientation after the pulse, J0 = {}", result.grid.j0),
          "<cos theta>", [](const SweepRecord& r) { return r.observables.orientation; }, true);
    case PlotKind::kAlignment:
      return line_plot(
          result, fmt::format("alignment after the pulse, J0 = {}", result.grid.j0),
          "<cos^2 theta>", [](const SweepRecord& r) { return r.observables.alignment; }, true,
          field_free_alignment(result.grid.j0));
    case PlotKind::kSurfaceHeatmap:
      return surface_plot(result);
    case PlotKind::kPolarDensity:
      return polar_plot(result);
  }
  throw DomainError("unknown plot kind");
}

std::vector<std::filesystem::path> emit_plots(const SweepResult& result,
                                              std::span<const PlotKind> kinds,
                                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> written;
  for (PlotKind kind : kinds) {
    const std::string body = render_plot(result, kind);
    const auto path = dir / plot_file_name(kind);
    std::ofstream out(path, std::ios::binary);
    out << body;
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
    written.push_back(path);
  }
  return written;
}

}  // namespace rotor::cli
