#include "morph/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace morph {

Annulus annulus_of(const Morphology& m) {
  return Annulus{std::abs(m.l1 - m.l2), m.l1 + m.l2};
}

CartesianPoint forward_kinematics(const Morphology& m, const JointConfig& q) {
  const double t12 = q.theta1 + q.theta2;
  return CartesianPoint{m.l1 * std::cos(q.theta1) + m.l2 * std::cos(t12),
                        m.l1 * std::sin(q.theta1) + m.l2 * std::sin(t12)};
}

Mat2 jacobian(const Morphology& m, const JointConfig& q) {
  const double t12 = q.theta1 + q.theta2;
  const double s1 = std::sin(q.theta1), c1 = std::cos(q.theta1);
  const double s12 = std::sin(t12), c12 = std::cos(t12);
  Mat2 j;
  j.m00 = -m.l1 * s1 - m.l2 * s12;
  j.m01 = -m.l2 * s12;
  j.m10 = m.l1 * c1 + m.l2 * c12;
  j.m11 = m.l2 * c12;
  return j;
}

double manipulability(const Morphology& m, double theta2) {
  return m.l1 * m.l2 * std::abs(std::sin(theta2));
}

double manipulability_normalized(double theta2) { return std::abs(std::sin(theta2)); }

std::optional<JointConfig> inverse_kinematics_elbow_up(const Morphology& m,
                                                       const CartesianPoint& target) {
  const double r = std::hypot(target.x, target.y);
  const Annulus ann = annulus_of(m);
  if (!ann.contains(r, kReachTolerance)) {
    return std::nullopt;
  }
  // Clamp guards boundary targets admitted by the reach tolerance.
  const double cos_t2 =
      std::clamp((r * r - m.l1 * m.l1 - m.l2 * m.l2) / (2.0 * m.l1 * m.l2), -1.0, 1.0);
  const double theta2 = std::acos(cos_t2);
  const double theta1 = std::atan2(target.y, target.x) -
                        std::atan2(m.l2 * std::sin(theta2), m.l1 + m.l2 * std::cos(theta2));
  return JointConfig{theta1, theta2};
}

std::pair<double, double> phi_to_lengths(const PhiParam& p, double radius) {
  return {radius * std::cos(p.phi), radius * std::sin(p.phi)};
}

double phi_norm_manipulability(const PhiParam& p) { return std::abs(std::sin(2.0 * p.phi)); }

double manipulability_on_circle(double l1, double l2, double radius) {
  const double r_min = std::abs(l1 - l2);
  const double r_max = l1 + l2;
  if (radius < r_min - kReachTolerance || radius > r_max + kReachTolerance) {
    throw std::domain_error("manipulability_on_circle: circle radius outside the arm annulus");
  }
  const double c = std::clamp((radius * radius - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  return l1 * l2 * std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace morph
