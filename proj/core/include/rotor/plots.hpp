#pragma once

// SVG figures of sweep results.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rotor/config.hpp"
#include "rotor/sweep.hpp"

namespace rotor::cli {

/// Renders one figure as an SVG document. Throws DomainError when the result
/// lacks the series the figure needs (the message names the series).
std::string render_plot(const SweepResult& result, PlotKind kind);

/// File name used for a figure, e.g. "energy_vs_sigma.svg".
std::string plot_file_name(PlotKind kind);

/// Writes every requested figure into `dir` and returns the paths.
std::vector<std::filesystem::path> emit_plots(const SweepResult& result,
                                              std::span<const PlotKind> kinds,
                                              const std::filesystem::path& dir);

}  // namespace rotor::cli
