#include "morph/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace morph {

double RewardBreakdown::value(RewardVariant v) const {
  switch (v) {
    case RewardVariant::Raw:
      return r_raw;
    case RewardVariant::Norm:
      return r_norm;
    case RewardVariant::Band:
      return r_band;
    case RewardVariant::Hybrid:
      return r_hyb;
  }
  throw std::logic_error("RewardBreakdown::value: unknown variant");
}

RewardBreakdown evaluate_reward(const Morphology& m, const SampledPath& path, const Band& band,
                                const RewardWeights& wts) {
  if (path.points.empty()) {
    throw std::invalid_argument("evaluate_reward: empty path");
  }

  RewardBreakdown out;
  double sum_w = 0.0, sum_wn = 0.0;
  for (const CartesianPoint& target : path.points) {
    const auto q = inverse_kinematics_elbow_up(m, target);
    if (!q) continue;
    ++out.n_reach;
    const double sin_t2 = std::abs(std::sin(q->theta2));
    sum_w += m.l1 * m.l2 * sin_t2;
    sum_wn += sin_t2;
  }

  const auto n = static_cast<double>(path.points.size());
  out.coverage = out.n_reach / n;
  if (out.n_reach > 0) {
    out.w_bar = sum_w / out.n_reach;
    out.w_bar_n = sum_wn / out.n_reach;
  }

  const Annulus ann = annulus_of(m);
  const double under = std::max(band.inner - ann.r_min, 0.0);
  const double over = std::max(ann.r_max - band.outer, 0.0);
  out.band_penalty = wts.w_in * under * under + wts.w_out * over * over;
  out.unreach_penalty = wts.w_unr * (1.0 - out.coverage);
  out.length_penalty = wts.w_len * (m.l1 + m.l2);

  out.r_raw = out.w_bar - out.unreach_penalty - out.length_penalty;
  out.r_norm = out.w_bar_n - out.unreach_penalty - out.length_penalty;
  out.r_band = -out.band_penalty - out.unreach_penalty - out.length_penalty;
  out.r_hyb = out.w_bar_n - out.band_penalty - out.unreach_penalty - out.length_penalty;
  return out;
}

double circle_analytic_reward(const PhiParam& p) { return std::sin(2.0 * p.phi); }

}  // namespace morph
