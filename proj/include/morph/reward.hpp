#pragma once

#include "morph/kinematics.hpp"
#include "morph/taskpaths.hpp"

namespace morph {

struct RewardWeights {
  double w_unr = 5.0;  // unreachability
  double w_in = 5.0;   // inner band hinge
  double w_out = 5.0;  // outer band hinge
  double w_len = 0.5;  // total-length regularizer, per meter
};

enum class RewardVariant { Raw, Norm, Band, Hybrid };

struct RewardBreakdown {
  int n_reach = 0;
  double coverage = 0.0;         // n_reach / N
  double w_bar = 0.0;            // reachability-masked mean of l1*l2*|sin t2|
  double w_bar_n = 0.0;          // masked mean of |sin t2|
  double band_penalty = 0.0;     // B
  double unreach_penalty = 0.0;  // W_unr * (1 - coverage)
  double length_penalty = 0.0;   // W_len * (l1 + l2)
  double r_raw = 0.0;
  double r_norm = 0.0;
  double r_band = 0.0;
  double r_hyb = 0.0;

  double value(RewardVariant v) const;
};

// Path reward for one morphology: per-sample elbow-up IK decides
// reachability, masked means give the manipulability terms, and the hinge
// penalties compare the arm annulus against the target band. Unreachable
// paths yield coverage 0, never a fault. Throws std::invalid_argument on an
// empty path.
RewardBreakdown evaluate_reward(const Morphology& m, const SampledPath& path, const Band& band,
                                const RewardWeights& wts);

// Objective for all circle experiments: sin(2 phi), no band or length
// terms. The circle band [R, R] would otherwise misfire its inner hinge at
// the optimum, where r_min = 0.
double circle_analytic_reward(const PhiParam& p);

}  // namespace morph
