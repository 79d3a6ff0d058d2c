#pragma once

#include "morph/kinematics.hpp"
#include "morph/reward.hpp"
#include "morph/taskpaths.hpp"

namespace morph {

enum class BaselineKind { Analytic, Sweep, EqualDex, BandMatch };

// `objective` carries the baseline's own figure of merit: peak raw
// manipulability for Analytic, normalized manipulability at the returned
// angle for Sweep, the hybrid path reward under the given weights for
// EqualDex, and the band penalty (zero by construction) for BandMatch.
struct BaselineResult {
  BaselineKind kind = BaselineKind::Analytic;
  Morphology morphology;
  double objective = 0.0;
};

// Closed-form circle optimum: equal links on the locus, orthogonal elbow,
// peak manipulability radius^2 / 2.
BaselineResult analytic_circle_optimum(double radius);

// Argmax of |sin(2 phi)| on a uniform grid over [eps, pi/2 - eps]. The
// default 1801 points give 0.05 degree resolution.
BaselineResult phi_sweep(double radius, int n_grid = 1801);

// Mean squared radius of the path: circle R^2; ellipse (a^2 + b^2)/2
// averaged over the parameter; rectangle perimeter-weighted
// (w^3 + 3 w h^2 + 3 h w^2 + h^3) / (12 (w + h)).
double expected_r2(const TaskPath& t);

// Symmetric design l1 = l2 = sqrt(E[r^2] / 2), elbow logged as pi/2.
BaselineResult equal_dex_baseline(const TaskPath& t, const RewardWeights& wts = {});

// l1 = (a + b)/2, l2 = (a - b)/2 (larger link first), whose annulus equals
// the band exactly. Throws std::invalid_argument for a degenerate band
// (inner == outer would need l2 = 0).
BaselineResult band_match_baseline(const Band& band);

}  // namespace morph
