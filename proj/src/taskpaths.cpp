#include "morph/taskpaths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace morph {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CartesianPoint rectangle_point_at(double w, double h, double s) {
  // Arc-length position along the perimeter, s in [0, 2(w+h)), starting at
  // (+w/2, +h/2) and walking counter-clockwise: top, left, bottom, right.
  const double hw = 0.5 * w, hh = 0.5 * h;
  if (s < w) return {hw - s, hh};
  s -= w;
  if (s < h) return {-hw, hh - s};
  s -= h;
  if (s < w) return {-hw + s, -hh};
  s -= w;
  return {hw, -hh + s};
}

// t value whose cumulative ellipse arc length equals `target`, found on a
// dense table by bisection plus linear interpolation.
double ellipse_t_for_arclength(double a, double b, double target) {
  constexpr int kTableSize = 1 << 14;
  static thread_local double cached_a = -1.0, cached_b = -1.0;
  static thread_local std::vector<double> cum;
  if (cached_a != a || cached_b != b) {
    cum.assign(kTableSize + 1, 0.0);
    double prev_speed = std::hypot(-a * std::sin(0.0), b * std::cos(0.0));
    for (int i = 1; i <= kTableSize; ++i) {
      const double t = kTwoPi * i / kTableSize;
      const double speed = std::hypot(-a * std::sin(t), b * std::cos(t));
      cum[i] = cum[i - 1] + 0.5 * (prev_speed + speed) * (kTwoPi / kTableSize);
      prev_speed = speed;
    }
    cached_a = a;
    cached_b = b;
  }
  const double total = cum.back();
  target = std::clamp(target, 0.0, total);
  const auto it = std::lower_bound(cum.begin(), cum.end(), target);
  if (it == cum.begin()) return 0.0;
  const auto i = static_cast<int>(it - cum.begin());
  const double frac = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
  return kTwoPi * (i - 1 + frac) / kTableSize;
}

}  // namespace

TaskPath TaskPath::circle(double radius, int n) {
  return TaskPath{PathKind::Circle, radius, 0.0, n, EllipseSampling::UniformParameter};
}

TaskPath TaskPath::ellipse(double semi_x, double semi_y, int n) {
  return TaskPath{PathKind::Ellipse, semi_x, semi_y, n, EllipseSampling::UniformParameter};
}

TaskPath TaskPath::rectangle(double width, double height, int n) {
  return TaskPath{PathKind::Rectangle, width, height, n, EllipseSampling::UniformParameter};
}

SampledPath sample_path(const TaskPath& t) {
  if (t.n_samples <= 0) {
    throw std::invalid_argument("sample_path: n_samples must be positive");
  }
  SampledPath out;
  out.points.reserve(static_cast<std::size_t>(t.n_samples));
  switch (t.kind) {
    case PathKind::Circle:
      for (int k = 0; k < t.n_samples; ++k) {
        const double theta = kTwoPi * k / t.n_samples;
        out.points.push_back({t.size1 * std::cos(theta), t.size1 * std::sin(theta)});
      }
      break;
    case PathKind::Ellipse:
      for (int k = 0; k < t.n_samples; ++k) {
        double param = kTwoPi * k / t.n_samples;
        if (t.ellipse_sampling == EllipseSampling::UniformArcLength) {
          const double total = perimeter(t);
          param = ellipse_t_for_arclength(t.size1, t.size2, total * k / t.n_samples);
        }
        out.points.push_back({t.size1 * std::cos(param), t.size2 * std::sin(param)});
      }
      break;
    case PathKind::Rectangle: {
      const double total = perimeter(t);
      for (int k = 0; k < t.n_samples; ++k) {
        out.points.push_back(rectangle_point_at(t.size1, t.size2, total * k / t.n_samples));
      }
      break;
    }
  }
  return out;
}

Band band_for(const TaskPath& t) {
  switch (t.kind) {
    case PathKind::Circle:
      return Band{t.size1, t.size1};
    case PathKind::Ellipse:
      return Band{std::min(t.size1, t.size2), std::max(t.size1, t.size2)};
    case PathKind::Rectangle:
      return Band{0.5 * std::min(t.size1, t.size2), 0.5 * std::hypot(t.size1, t.size2)};
  }
  throw std::logic_error("band_for: unknown path kind");
}

double perimeter(const TaskPath& t) {
  switch (t.kind) {
    case PathKind::Circle:
      return kTwoPi * t.size1;
    case PathKind::Ellipse: {
      // Numerical arc length (no closed form); trapezoid on a periodic
      // integrand converges far below the tolerances used anywhere here.
      constexpr int kSegments = 1 << 14;
      double sum = 0.0;
      double prev = std::hypot(-t.size1 * std::sin(0.0), t.size2 * std::cos(0.0));
      for (int i = 1; i <= kSegments; ++i) {
        const double tt = kTwoPi * i / kSegments;
        const double speed = std::hypot(-t.size1 * std::sin(tt), t.size2 * std::cos(tt));
        sum += 0.5 * (prev + speed) * (kTwoPi / kSegments);
        prev = speed;
      }
      return sum;
    }
    case PathKind::Rectangle:
      return 2.0 * (t.size1 + t.size2);
  }
  throw std::logic_error("perimeter: unknown path kind");
}

}  // namespace morph
