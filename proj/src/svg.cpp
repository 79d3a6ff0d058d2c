#include "morph/svg.hpp"

#include <cstdio>

namespace morph::harness {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& color,
                     double stroke_width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(stroke_width) +
           "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& color, double stroke_width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           num(stroke_width) + "\" points=\"";
  for (const auto& [x, y] : pts) {
    body_ += num(x) + "," + num(y) + " ";
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& color) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + color + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     double opacity) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) +
           "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& anchor) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

std::string SvgCanvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" +
         body_ + "</svg>\n";
}

}  // namespace morph::harness
