#pragma once

#include <vector>

#include "morph/kinematics.hpp"

namespace morph {

enum class PathKind { Circle, Ellipse, Rectangle };

// Ellipse points are placed at uniform parameter values by default; the
// arc-length variant exists for sensitivity checks only.
enum class EllipseSampling { UniformParameter, UniformArcLength };

// Closed task path centered at the arm base. size1/size2 meaning depends on
// kind: Circle -> (radius, unused); Ellipse -> (semi-axis x, semi-axis y);
// Rectangle -> (full width, full height).
struct TaskPath {
  PathKind kind = PathKind::Circle;
  double size1 = 0.0;
  double size2 = 0.0;
  int n_samples = 720;
  EllipseSampling ellipse_sampling = EllipseSampling::UniformParameter;

  static TaskPath circle(double radius, int n = 720);
  static TaskPath ellipse(double semi_x, double semi_y, int n = 720);
  static TaskPath rectangle(double width, double height, int n = 720);
};

// Target radial interval the arm annulus should match.
struct Band {
  double inner = 0.0;  // b
  double outer = 0.0;  // a
};

struct SampledPath {
  std::vector<CartesianPoint> points;
};

// Deterministic, order-stable sampling:
//   Circle    - angles 2*pi*k/N starting at (r, 0), counter-clockwise.
//   Ellipse   - (size1 cos t, size2 sin t) at t = 2*pi*k/N (or arc-length
//               uniform t when configured).
//   Rectangle - uniform arc length along the perimeter, starting at the
//               corner (+w/2, +h/2) and traversing counter-clockwise.
SampledPath sample_path(const TaskPath& t);

// Circle -> [R, R]; Ellipse -> [min axis, max axis];
// Rectangle -> [half the short side, half the diagonal].
Band band_for(const TaskPath& t);

double perimeter(const TaskPath& t);

}  // namespace morph
