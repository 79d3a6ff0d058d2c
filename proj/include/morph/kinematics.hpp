#pragma once

#include <optional>
#include <utility>

namespace morph {

// Exact closed-form kinematics of a planar 2R arm. All angles are radians,
// all lengths meters. Everything here is a pure function.

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
};

// Candidate arm design. theta2_cmd is the commanded elbow angle carried
// alongside the link lengths; path rewards recompute the elbow per target
// via IK, so theta2_cmd is logged but does not enter those rewards.
struct Morphology {
  double l1 = 0.0;
  double l2 = 0.0;
  double theta2_cmd = 0.0;
};

// Elbow-up convention: theta2 in [0, pi]. theta1 is unrestricted.
struct JointConfig {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// Radial interval reachable by the arm.
struct Annulus {
  double r_min = 0.0;
  double r_max = 0.0;

  bool contains(double r, double tol = 0.0) const {
    return r >= r_min - tol && r <= r_max + tol;
  }
};

// Position of a design on the quarter-circle locus l1 = R cos(phi),
// l2 = R sin(phi). phi is kept inside [kPhiEpsilon, pi/2 - kPhiEpsilon]
// so both links stay strictly positive.
struct PhiParam {
  double phi = 0.0;
};

inline constexpr double kPhiEpsilon = 1e-3;

// Targets within this distance of the annulus boundary count as reachable,
// so full-extension points (e.g. a circle touching r_max) stay well-defined.
inline constexpr double kReachTolerance = 1e-9;

struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  double det() const { return m00 * m11 - m01 * m10; }
};

Annulus annulus_of(const Morphology& m);

CartesianPoint forward_kinematics(const Morphology& m, const JointConfig& q);

// Columns are the partial derivatives of (x, y) w.r.t. (theta1, theta2).
Mat2 jacobian(const Morphology& m, const JointConfig& q);

// Yoshikawa measure sqrt(det(J J^T)) = l1 * l2 * |sin(theta2)|.
double manipulability(const Morphology& m, double theta2);

// Configuration-only factor |sin(theta2)|, link scale removed.
double manipulability_normalized(double theta2);

// Elbow-up branch; returns nullopt when the target radius lies outside
// [r_min - kReachTolerance, r_max + kReachTolerance]. Unreachable is a
// normal outcome, not a fault.
std::optional<JointConfig> inverse_kinematics_elbow_up(const Morphology& m,
                                                       const CartesianPoint& target);

// (R cos(phi), R sin(phi)); the squared lengths sum to R^2 exactly.
std::pair<double, double> phi_to_lengths(const PhiParam& p, double radius);

// Manipulability of the locus design, normalized so the peak (phi = pi/4)
// equals 1: |sin(2 phi)|.
double phi_norm_manipulability(const PhiParam& p);

// Manipulability attained anywhere on a centered circle of radius `radius`
// by an arm with the given links, using the elbow angle forced by the
// circle constraint. Throws std::domain_error when the circle is not
// contained in the arm's annulus.
double manipulability_on_circle(double l1, double l2, double radius);

}  // namespace morph
