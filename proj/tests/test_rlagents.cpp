#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "morph/reward.hpp"
#include "morph/rlagents.hpp"

using namespace morph;
using namespace morph::rl;

namespace {

constexpr double kPi = std::numbers::pi;

const RewardFn kCircleReward = [](const PhysicalAction& a) {
  return circle_analytic_reward(PhiParam{a.phi});
};

RlConfig small_config(int episodes) {
  RlConfig cfg;
  cfg.episodes = episodes;
  cfg.batch = 32;
  cfg.warmup = 32;
  cfg.ppo_batch = 32;
  cfg.ppo_minibatch = 16;
  cfg.ppo_epochs = 4;
  return cfg;
}

bool records_identical(const TrainRecord& a, const TrainRecord& b) {
  if (a.episodes.size() != b.episodes.size()) return false;
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    if (a.episodes[i].reward != b.episodes[i].reward) return false;
    if (a.episodes[i].action.morph.l1 != b.episodes[i].action.morph.l1) return false;
    if (a.episodes[i].action.morph.l2 != b.episodes[i].action.morph.l2) return false;
  }
  return a.best_reward == b.best_reward && a.greedy_reward == b.greedy_reward &&
         a.greedy_action.morph.l1 == b.greedy_action.morph.l1 && a.updates == b.updates;
}

// Finite-difference probe of an actor-loss gradient function: perturb a few
// policy parameters and compare the loss slope against the returned grads.
template <typename LossFn>
void fd_check_policy(nn::Mlp policy, const LossFn& eval, RngStream& rng, int probes = 60) {
  const auto base = eval(policy);
  const double h = 1e-6;
  for (int p = 0; p < probes; ++p) {
    const auto layer = rng.uniform_index(policy.layer_count());
    auto& w = policy.weights()[layer];
    const auto r = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(w.rows())));
    const auto c = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(w.cols())));
    const double saved = w(r, c);
    w(r, c) = saved + h;
    const double lp = eval(policy).loss;
    w(r, c) = saved - h;
    const double lm = eval(policy).loss;
    w(r, c) = saved;
    const double fd = (lp - lm) / (2 * h);
    const double an = base.grads.layers[layer].w(r, c);
    CHECK(std::abs(fd - an) <= std::max(5e-6, 1e-3 * std::abs(an)));
  }
}

}  // namespace

TEST_CASE("action mapping") {
  const ActionSpec circle{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  Eigen::VectorXd u(1);
  u << 0.0;
  PhysicalAction a = map_action(circle, u);
  CHECK(a.phi == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(a.morph.l1 == doctest::Approx(0.40 / std::numbers::sqrt2).epsilon(1e-12));

  u << 0.999999;
  a = map_action(circle, u);
  CHECK(a.phi < kPi / 2 - kPhiEpsilon + 1e-9);
  CHECK(a.phi > kPi / 2 - kPhiEpsilon - 1e-5);

  const ActionSpec full{ActionMode::FullMorphology, 0.40, 0.05, 0.60};
  Eigen::VectorXd v(3);
  v << 0.0, 0.0, 0.0;
  a = map_action(full, v);
  CHECK(a.morph.l1 == doctest::Approx(0.325).epsilon(1e-15));
  CHECK(a.morph.l2 == doctest::Approx(0.325).epsilon(1e-15));
  CHECK(a.morph.theta2_cmd == doctest::Approx(kPi / 2).epsilon(1e-15));

  v << -1.0 + 1e-12, 1.0 - 1e-12, 0.5;
  a = map_action(full, v);
  CHECK(a.morph.l1 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(a.morph.l2 == doctest::Approx(0.60).epsilon(1e-9));

  CHECK_THROWS_AS(map_action(circle, v), std::logic_error);
}

TEST_CASE("context encoding") {
  const Context c = Context::for_task(TaskPath::circle(0.40));
  CHECK(c.dim() == 5);
  CHECK(c.v(0) == 1.0);
  CHECK(c.v.segment(0, 3).sum() == 1.0);
  CHECK(c.v(3) == 0.40);

  const Context e = Context::for_task(TaskPath::ellipse(0.40, 0.25));
  CHECK(e.v(1) == 1.0);
  CHECK(e.v(3) == 0.40);
  CHECK(e.v(4) == 0.25);

  const Context r = Context::for_task(TaskPath::rectangle(0.70, 0.40));
  CHECK(r.v(2) == 1.0);
}

TEST_CASE("replay buffer ring and sampling") {
  ReplayBuffer buf(8);
  RngStream rng(1);
  for (int i = 0; i < 20; ++i) {
    Transition t;
    t.context = Eigen::VectorXd::Zero(1);
    t.action = Eigen::VectorXd::Constant(1, static_cast<double>(i));
    t.reward = i;
    buf.push(std::move(t));
    CHECK(buf.size() <= 8);
  }
  CHECK(buf.size() == 8);
  // oldest entries were overwritten: rewards are 12..19 in ring order
  std::set<double> rewards;
  for (std::size_t i = 0; i < buf.size(); ++i) rewards.insert(buf[i].reward);
  CHECK(*rewards.begin() == 12.0);
  CHECK(*rewards.rbegin() == 19.0);

  const auto idx = buf.sample_indices(5, rng);
  CHECK(idx.size() == 5);
  std::set<std::uint32_t> unique(idx.begin(), idx.end());
  CHECK(unique.size() == 5);  // without replacement
  for (const auto i : idx) CHECK(i < buf.size());

  CHECK_THROWS_AS(buf.sample_indices(9, rng), std::logic_error);
}

TEST_CASE("sac actor gradient matches finite differences") {
  RngStream rng(2);
  nn::Mlp policy({5, 16, 16, 2}, rng, 1e-2);
  nn::Mlp q1({6, 16, 16, 1}, rng);
  nn::Mlp q2({6, 16, 16, 1}, rng);
  const Eigen::MatrixXd ctx = Eigen::VectorXd::Ones(5).replicate(1, 12);
  Eigen::MatrixXd noise(1, 12);
  for (int j = 0; j < 12; ++j) noise(0, j) = rng.normal();

  fd_check_policy(
      policy,
      [&](const nn::Mlp& p) {
        return detail::sac_actor_loss_and_grad(p, q1, q2, ctx, noise, 0.2);
      },
      rng);
}

TEST_CASE("ddpg actor gradient matches finite differences") {
  RngStream rng(3);
  nn::Mlp actor({5, 16, 16, 3}, rng, 1e-2);
  nn::Mlp critic({8, 16, 16, 1}, rng);
  const Eigen::MatrixXd ctx = Eigen::VectorXd::Ones(5).replicate(1, 8);

  fd_check_policy(
      actor,
      [&](const nn::Mlp& a) { return detail::ddpg_actor_loss_and_grad(a, critic, ctx); }, rng);
}

TEST_CASE("ppo policy gradient matches finite differences") {
  RngStream rng(4);
  nn::Mlp policy({5, 16, 16, 2}, rng, 1e-2);
  const int b = 16;
  const Eigen::MatrixXd ctx = Eigen::VectorXd::Ones(5).replicate(1, b);
  Eigen::MatrixXd pre(1, b);
  Eigen::VectorXd adv(b), logp_old(b);
  for (int j = 0; j < b; ++j) {
    pre(0, j) = rng.normal();
    adv(j) = rng.uniform(-1.0, 1.0);
    // stale log-probs so some samples hit the clipped branch
    const nn::GaussianHead head = nn::split_gaussian_head(policy.forward(ctx.col(0)).col(0));
    logp_old(j) = nn::squashed_log_prob(head, pre.col(j)) + rng.uniform(-0.4, 0.4);
  }

  fd_check_policy(
      policy,
      [&](const nn::Mlp& p) {
        return detail::ppo_policy_loss_and_grad(p, ctx, pre, adv, logp_old, 0.2);
      },
      rng);
}

TEST_CASE("training is deterministic per seed") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  const RlConfig cfg = small_config(96);

  for (int algo = 0; algo < 3; ++algo) {
    auto runner = [&](std::uint64_t seed) {
      if (algo == 0) return train_sac(kCircleReward, ctx, spec, seed, cfg);
      if (algo == 1) return train_ddpg(kCircleReward, ctx, spec, seed, cfg);
      return train_ppo(kCircleReward, ctx, spec, seed, cfg);
    };
    const TrainRecord a = runner(7);
    const TrainRecord b = runner(7);
    const TrainRecord c = runner(8);
    CHECK(records_identical(a, b));
    CHECK(!records_identical(a, c));
  }
}

TEST_CASE("gamma is inert for single-step episodes") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  RlConfig g99 = small_config(96);
  RlConfig g0 = g99;
  g0.gamma = 0.0;
  CHECK(records_identical(train_sac(kCircleReward, ctx, spec, 5, g99),
                          train_sac(kCircleReward, ctx, spec, 5, g0)));
  CHECK(records_identical(train_ddpg(kCircleReward, ctx, spec, 5, g99),
                          train_ddpg(kCircleReward, ctx, spec, 5, g0)));
}

TEST_CASE("no off-policy updates before warmup") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  RlConfig cfg;
  cfg.episodes = 200;  // below the default 256-episode warmup
  const TrainRecord sac = train_sac(kCircleReward, ctx, spec, 1, cfg);
  CHECK(sac.updates == 0);
  const TrainRecord ddpg = train_ddpg(kCircleReward, ctx, spec, 1, cfg);
  CHECK(ddpg.updates == 0);

  RlConfig cfg2;
  cfg2.episodes = 300;
  CHECK(train_sac(kCircleReward, ctx, spec, 1, cfg2).updates == 300 - 256);
}

TEST_CASE("record invariants and greedy purity") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  const RlConfig cfg = small_config(128);

  SacAgent agent(ctx, spec, cfg, 3);
  const TrainRecord rec = agent.train(kCircleReward);
  double max_r = -1e300;
  for (const auto& e : rec.episodes) max_r = std::max(max_r, e.reward);
  CHECK(rec.best_reward == max_r);
  CHECK(rec.params_finite);
  CHECK(rec.episodes.size() == 128);

  const PhysicalAction g1 = agent.greedy();
  const PhysicalAction g2 = agent.greedy();
  CHECK(g1.phi == g2.phi);
  CHECK(g1.morph.l1 == g2.morph.l1);
}

TEST_CASE("untrained greedy sits at the action-box midpoint") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  const SacAgent agent(ctx, spec, RlConfig{}, 1);
  // near-zero final-layer init puts the mean near u = 0, i.e. phi = 45 deg
  CHECK(std::abs(agent.greedy().phi - kPi / 4) < 0.03);
}

TEST_CASE("sac circle short run approaches the optimum") {
  const Context ctx = Context::for_task(TaskPath::circle(0.40));
  const ActionSpec spec{ActionMode::CirclePhi, 0.40, 0.05, 0.60};
  RlConfig cfg;
  cfg.episodes = 1200;
  const TrainRecord rec = train_sac(kCircleReward, ctx, spec, 1, cfg);
  CHECK(std::abs(rec.best_action.phi - kPi / 4) < 2.0 * kPi / 180.0);
  CHECK(rec.best_reward > 0.999);
}

TEST_CASE("ppo learning progress on the ellipse (short run)") {
  const TaskPath t = TaskPath::ellipse(0.40, 0.25, 360);
  const SampledPath path = sample_path(t);
  const Band band = band_for(t);
  const RewardFn fn = [&](const PhysicalAction& a) {
    return evaluate_reward(a.morph, path, band, RewardWeights{}).r_hyb;
  };
  RlConfig cfg;
  cfg.episodes = 1280;
  const TrainRecord rec = train_ppo(fn, Context::for_task(t),
                                    ActionSpec{ActionMode::FullMorphology, 0.40, 0.05, 0.60}, 2,
                                    cfg);
  CHECK(rec.episodes.size() == 1280);
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 256; ++i) {
    first += rec.episodes[static_cast<std::size_t>(i)].reward;
    last += rec.episodes[rec.episodes.size() - 1 - static_cast<std::size_t>(i)].reward;
  }
  CHECK(last > first);
}
