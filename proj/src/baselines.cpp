#include "morph/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace morph {

BaselineResult analytic_circle_optimum(double radius) {
  if (radius <= 0.0) {
    throw std::invalid_argument("analytic_circle_optimum: radius must be positive");
  }
  const double l = radius / std::numbers::sqrt2;
  return BaselineResult{BaselineKind::Analytic, Morphology{l, l, std::numbers::pi / 2.0},
                        0.5 * radius * radius};
}

BaselineResult phi_sweep(double radius, int n_grid) {
  if (n_grid < 3) {
    throw std::invalid_argument("phi_sweep: need at least 3 grid points");
  }
  const double lo = kPhiEpsilon;
  const double hi = std::numbers::pi / 2.0 - kPhiEpsilon;
  double best_phi = lo;
  double best_val = -1.0;
  for (int i = 0; i < n_grid; ++i) {
    const double phi = lo + (hi - lo) * i / (n_grid - 1);
    const double val = phi_norm_manipulability(PhiParam{phi});
    if (val > best_val) {
      best_val = val;
      best_phi = phi;
    }
  }
  const auto [l1, l2] = phi_to_lengths(PhiParam{best_phi}, radius);
  return BaselineResult{BaselineKind::Sweep, Morphology{l1, l2, std::numbers::pi / 2.0},
                        best_val};
}

double expected_r2(const TaskPath& t) {
  switch (t.kind) {
    case PathKind::Circle:
      return t.size1 * t.size1;
    case PathKind::Ellipse:
      return 0.5 * (t.size1 * t.size1 + t.size2 * t.size2);
    case PathKind::Rectangle: {
      const double w = t.size1, h = t.size2;
      return (w * w * w + 3.0 * w * h * h + 3.0 * h * w * w + h * h * h) / (12.0 * (w + h));
    }
  }
  throw std::logic_error("expected_r2: unknown path kind");
}

BaselineResult equal_dex_baseline(const TaskPath& t, const RewardWeights& wts) {
  const double l = std::sqrt(expected_r2(t) / 2.0);
  const Morphology m{l, l, std::numbers::pi / 2.0};
  const double objective = evaluate_reward(m, sample_path(t), band_for(t), wts).r_hyb;
  return BaselineResult{BaselineKind::EqualDex, m, objective};
}

BaselineResult band_match_baseline(const Band& band) {
  if (!(band.outer > band.inner)) {
    throw std::invalid_argument(
        "band_match_baseline: degenerate band (inner == outer leaves no second link)");
  }
  const double l1 = 0.5 * (band.outer + band.inner);
  const double l2 = 0.5 * (band.outer - band.inner);
  return BaselineResult{BaselineKind::BandMatch, Morphology{l1, l2, std::numbers::pi / 2.0}, 0.0};
}

}  // namespace morph
