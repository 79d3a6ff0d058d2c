#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "morph/kinematics.hpp"
#include "morph/rng.hpp"

using namespace morph;

namespace {

constexpr double kPi = std::numbers::pi;

// Central-difference Jacobian of forward_kinematics, the independent route
// the analytic Jacobian is checked against.
Mat2 finite_difference_jacobian(const Morphology& m, const JointConfig& q, double step) {
  auto fk = [&](double t1, double t2) { return forward_kinematics(m, JointConfig{t1, t2}); };
  const CartesianPoint xp1 = fk(q.theta1 + step, q.theta2);
  const CartesianPoint xm1 = fk(q.theta1 - step, q.theta2);
  const CartesianPoint xp2 = fk(q.theta1, q.theta2 + step);
  const CartesianPoint xm2 = fk(q.theta1, q.theta2 - step);
  Mat2 j;
  j.m00 = (xp1.x - xm1.x) / (2 * step);
  j.m10 = (xp1.y - xm1.y) / (2 * step);
  j.m01 = (xp2.x - xm2.x) / (2 * step);
  j.m11 = (xp2.y - xm2.y) / (2 * step);
  return j;
}

}  // namespace

TEST_CASE("forward kinematics closed-form points") {
  const Morphology m{1.0, 1.0, 0.0};

  auto p = forward_kinematics(m, {0.0, 0.0});
  CHECK(p.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(0.0).epsilon(1e-12));

  p = forward_kinematics(m, {0.0, kPi});
  CHECK(std::abs(p.x) < 1e-12);
  CHECK(std::abs(p.y) < 1e-12);

  // Locus design with orthogonal elbow lands on the 0.40 m circle.
  const double l = 0.40 / std::numbers::sqrt2;
  p = forward_kinematics({l, l, 0.0}, {-kPi / 4, kPi / 2});
  CHECK(std::hypot(p.x, p.y) == doctest::Approx(0.4000).epsilon(1e-6));
}

TEST_CASE("jacobian matches hand evaluation and determinant identity") {
  const Mat2 j = jacobian({1.0, 1.0, 0.0}, {0.0, kPi / 2});
  CHECK(j.m00 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(j.m01 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(j.m10 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(j.m11) < 1e-12);

  RngStream rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Morphology m{rng.uniform(0.05, 0.8), rng.uniform(0.05, 0.8), 0.0};
    const JointConfig q{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const double det = jacobian(m, q).det();
    CHECK(std::abs(det - m.l1 * m.l2 * std::sin(q.theta2)) < 1e-12);
  }
}

TEST_CASE("jacobian matches central differences") {
  RngStream rng(11);
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Morphology m{rng.uniform(0.05, 0.8), rng.uniform(0.05, 0.8), 0.0};
    const JointConfig q{rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi)};
    const Mat2 a = jacobian(m, q);
    const Mat2 n = finite_difference_jacobian(m, q, 1e-6);
    max_err = std::max({max_err, std::abs(a.m00 - n.m00), std::abs(a.m01 - n.m01),
                        std::abs(a.m10 - n.m10), std::abs(a.m11 - n.m11)});
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("manipulability values") {
  const double r = 0.40;
  const double l = r / std::numbers::sqrt2;
  CHECK(manipulability({l, l, 0.0}, kPi / 2) == doctest::Approx(0.0800).epsilon(1e-12));
  CHECK(manipulability({0.5, 0.5, 0.0}, 0.0) == 0.0);
  CHECK(manipulability({0.3, 0.2, 0.0}, kPi / 6) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(manipulability_normalized(kPi / 6) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("elbow-up inverse kinematics") {
  const double l = 0.40 / std::numbers::sqrt2;
  const Morphology locus{l, l, 0.0};

  const auto q = inverse_kinematics_elbow_up(locus, {0.4, 0.0});
  REQUIRE(q.has_value());
  CHECK(q->theta2 == doctest::Approx(kPi / 2).epsilon(1e-6));

  CHECK(!inverse_kinematics_elbow_up({0.3, 0.2, 0.0}, {0.6, 0.0}).has_value());

  // round trip, random reachable targets
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Morphology m{rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6), 0.0};
    const Annulus ann = annulus_of(m);
    const double radius = rng.uniform(ann.r_min, ann.r_max);
    const double angle = rng.uniform(-kPi, kPi);
    const CartesianPoint target{radius * std::cos(angle), radius * std::sin(angle)};
    const auto sol = inverse_kinematics_elbow_up(m, target);
    REQUIRE(sol.has_value());
    CHECK(sol->theta2 >= 0.0);
    CHECK(sol->theta2 <= kPi);
    const CartesianPoint back = forward_kinematics(m, *sol);
    CHECK(std::hypot(back.x - target.x, back.y - target.y) < 1e-9);
  }
}

TEST_CASE("ik of fk is identity on the elbow-up branch") {
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Morphology m{rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6), 0.0};
    const JointConfig q{rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi)};
    const auto sol = inverse_kinematics_elbow_up(m, forward_kinematics(m, q));
    REQUIRE(sol.has_value());
    CHECK(std::abs(sol->theta2 - q.theta2) < 1e-7);
    const double dt1 = std::remainder(sol->theta1 - q.theta1, 2 * kPi);
    // theta1 can legitimately flip when theta2 ~ 0 or pi makes the branch
    // ambiguous; the end-effector check below is the real contract.
    const CartesianPoint a = forward_kinematics(m, q);
    const CartesianPoint b = forward_kinematics(m, *sol);
    CHECK(std::hypot(a.x - b.x, a.y - b.y) < 1e-9);
    if (q.theta2 > 1e-3 && q.theta2 < kPi - 1e-3) CHECK(std::abs(dt1) < 1e-6);
  }
}

TEST_CASE("unreachable exactly outside the annulus") {
  RngStream rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Morphology m{rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6), 0.0};
    const Annulus ann = annulus_of(m);
    const double radius = rng.uniform(0.0, 1.5);
    // skip the tolerance shell where both answers are acceptable
    if (std::abs(radius - ann.r_min) < 1e-8 || std::abs(radius - ann.r_max) < 1e-8) continue;
    const double angle = rng.uniform(-kPi, kPi);
    const CartesianPoint target{radius * std::cos(angle), radius * std::sin(angle)};
    const bool reachable = inverse_kinematics_elbow_up(m, target).has_value();
    CHECK(reachable == ann.contains(radius));
  }

  // boundary targets inside the tolerance are reachable
  const Morphology m{0.3, 0.2, 0.0};
  CHECK(inverse_kinematics_elbow_up(m, {0.5, 0.0}).has_value());
  CHECK(inverse_kinematics_elbow_up(m, {0.5 + 0.5e-9, 0.0}).has_value());
  CHECK(!inverse_kinematics_elbow_up(m, {0.5 + 1e-6, 0.0}).has_value());
}

TEST_CASE("phi parameterization of the circle locus") {
  const auto [l1, l2] = phi_to_lengths(PhiParam{kPi / 4}, 0.40);
  CHECK(l1 == doctest::Approx(0.282843).epsilon(1e-6));
  CHECK(l2 == doctest::Approx(0.282843).epsilon(1e-6));

  const auto [a, b] = phi_to_lengths(PhiParam{kPhiEpsilon}, 0.40);
  CHECK(a == doctest::Approx(0.40).epsilon(1e-5));
  CHECK(b < 1e-3);

  RngStream rng(17);
  for (int i = 0; i < 200; ++i) {
    const double phi = rng.uniform(kPhiEpsilon, kPi / 2 - kPhiEpsilon);
    const auto [x, y] = phi_to_lengths(PhiParam{phi}, 0.40);
    CHECK(std::abs(x * x + y * y - 0.16) < 1e-12);
  }
}

TEST_CASE("normalized manipulability on the locus") {
  CHECK(phi_norm_manipulability(PhiParam{kPi / 4}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi_norm_manipulability(PhiParam{kPhiEpsilon}) ==
        doctest::Approx(2 * kPhiEpsilon).epsilon(1e-5));
  CHECK(phi_norm_manipulability(PhiParam{kPi / 8}) ==
        doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-12));

  // grid argmax sits at pi/4
  double best_phi = 0.0, best = -1.0;
  for (int i = 0; i < 1801; ++i) {
    const double phi =
        kPhiEpsilon + (kPi / 2 - 2 * kPhiEpsilon) * i / 1800.0;
    const double w = phi_norm_manipulability(PhiParam{phi});
    if (w > best) {
      best = w;
      best_phi = phi;
    }
  }
  CHECK(best_phi == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("manipulability on a centered circle") {
  const double r = 0.40;
  const double l = r / std::numbers::sqrt2;
  CHECK(manipulability_on_circle(l, l, r) == doctest::Approx(0.0800).epsilon(1e-12));
  CHECK(manipulability_on_circle(0.25, 0.15, 0.40) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(manipulability_on_circle(0.1, 0.1, 0.40), std::domain_error);

  // agrees with the IK route at any circle point
  const double l1 = 0.35, l2 = 0.25;
  const double closed = manipulability_on_circle(l1, l2, r);
  const Morphology m{l1, l2, 0.0};
  for (const double ang : {0.0, 0.7, 2.1, -2.9}) {
    const auto q = inverse_kinematics_elbow_up(m, {r * std::cos(ang), r * std::sin(ang)});
    REQUIRE(q.has_value());
    CHECK(std::abs(manipulability(m, q->theta2) - closed) < 1e-12);
  }
}
