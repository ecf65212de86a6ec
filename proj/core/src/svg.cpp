#include "rotor/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace rotor::svg {
namespace {

std::string coord(double v) { return fmt::format("{:.2f}", v); }

std::string points_attr(const std::vector<std::pair<double, double>>& points) {
  std::string s;
  for (const auto& [x, y] : points) {
    if (!s.empty()) s += ' ';
    s += coord(x) + ',' + coord(y);
  }
  return s;
}

}  // namespace

std::string Rgb::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

Rgb colormap(double t) {
  static constexpr std::array<std::array<int, 3>, 9> anchors{{
      {68, 1, 84},
      {71, 44, 122},
      {59, 81, 139},
      {44, 113, 142},
      {33, 144, 141},
      {39, 173, 129},
      {92, 200, 99},
      {170, 220, 50},
      {253, 231, 37},
  }};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(t), anchors.size() - 2);
  const double f = t - static_cast<double>(i);
  auto mix = [&](int c) {
    return static_cast<int>(std::lround(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c])));
  };
  return {mix(0), mix(1), mix(2)};
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill,
                    std::string_view stroke, double stroke_width) {
  elements_.push_back(fmt::format(
      R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}" stroke-width="{}"/>)",
      coord(x), coord(y), coord(w), coord(h), fill, stroke, stroke_width));
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                    double stroke_width, std::string_view dash) {
  const std::string dash_attr =
      dash.empty() ? std::string{} : fmt::format(R"( stroke-dasharray="{}")", dash);
  elements_.push_back(fmt::format(
      R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}"{}/>)", coord(x1),
      coord(y1), coord(x2), coord(y2), stroke, stroke_width, dash_attr));
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        std::string_view stroke, double stroke_width) {
  elements_.push_back(
      fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>)",
                  points_attr(points), stroke, stroke_width));
}

void Document::polygon(const std::vector<std::pair<double, double>>& points,
                       std::string_view fill, std::string_view stroke, double opacity) {
  elements_.push_back(
      fmt::format(R"(<polygon points="{}" fill="{}" stroke="{}" fill-opacity="{}"/>)",
                  points_attr(points), fill, stroke, opacity));
}

void Document::circle(double cx, double cy, double r, std::string_view fill,
                      std::string_view stroke) {
  elements_.push_back(fmt::format(R"(<circle cx="{}" cy="{}" r="{}" fill="{}" stroke="{}"/>)",
                                  coord(cx), coord(cy), coord(r), fill, stroke));
}

void Document::text(double x, double y, std::string_view content, double size,
                    std::string_view anchor, double rotate) {
  const std::string transform =
      rotate == 0.0 ? std::string{}
                    : fmt::format(R"x( transform="rotate({} {} {})")x", rotate, coord(x), coord(y));
  elements_.push_back(fmt::format(
      R"(<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{}"{}>{}</text>)",
      coord(x), coord(y), size, anchor, transform, escape(content)));
}

std::string Document::str() const {
  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      width_, height_);
  for (const auto& e : elements_) {
    out += "  ";
    out += e;
    out += '\n';
  }
  out += "</svg>\n";
  return out;
}

}  // namespace rotor::svg
