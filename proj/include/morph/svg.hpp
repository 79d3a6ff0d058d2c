#pragma once

#include <string>
#include <utility>
#include <vector>

namespace morph::harness {

// Minimal SVG writer for the optional report charts. Coordinates are pixel
// space; callers do their own data-to-pixel scaling.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke_width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double stroke_width = 1.5);
  void circle(double cx, double cy, double r, const std::string& color);
  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0);
  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start");

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

// Affine map from a data interval to a pixel interval.
class LinearScale {
 public:
  LinearScale(double d0, double d1, double p0, double p1)
      : d0_(d0), d1_(d1), p0_(p0), p1_(p1) {}

  double operator()(double v) const { return p0_ + (v - d0_) / (d1_ - d0_) * (p1_ - p0_); }

 private:
  double d0_, d1_, p0_, p1_;
};

}  // namespace morph::harness
