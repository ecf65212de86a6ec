#pragma once

// Minimal static SVG writer: shapes are appended as elements and the
// document is serialized in insertion order.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rotor::svg {

struct Rgb {
  int r = 0, g = 0, b = 0;
  std::string hex() const;
};

/// Perceptually ordered colormap (viridis anchors), t clamped to [0, 1].
Rgb colormap(double t);

std::string escape(std::string_view text);

class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none", double stroke_width = 0.0);
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double stroke_width = 1.0, std::string_view dash = {});
  void polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke,
                double stroke_width = 1.5);
  void polygon(const std::vector<std::pair<double, double>>& points, std::string_view fill,
               std::string_view stroke = "none", double opacity = 1.0);
  void circle(double cx, double cy, double r, std::string_view fill,
              std::string_view stroke = "none");
  void text(double x, double y, std::string_view content, double size = 12.0,
            std::string_view anchor = "start", double rotate = 0.0);

  std::string str() const;
  std::size_t element_count() const { return elements_.size(); }

 private:
  double width_;
  double height_;
  std::vector<std::string> elements_;
};

}  // namespace rotor::svg
