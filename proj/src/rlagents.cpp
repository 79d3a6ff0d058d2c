#include "morph/rlagents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace morph::rl {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

Eigen::MatrixXd replicate_column(const Eigen::VectorXd& v, Eigen::Index cols) {
  return v.replicate(1, cols);
}

// One regression step of a scalar critic toward per-sample targets.
void critic_mse_step(nn::Mlp& critic, nn::Adam& opt, const Eigen::MatrixXd& input,
                     const Eigen::RowVectorXd& target) {
  nn::MlpCache cache;
  const Eigen::MatrixXd q = critic.forward(input, &cache);
  const Eigen::MatrixXd grad =
      (2.0 / static_cast<double>(target.size())) * (q - target);
  opt.step(critic, critic.backward(cache, grad));
}

std::vector<std::uint32_t> shuffled_indices(std::size_t n, RngStream& rng) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

void require_finite(bool ok, const char* algo, std::uint64_t seed, long update) {
  if (!ok) {
    throw std::runtime_error(std::string(algo) + ": non-finite parameters (seed " +
                             std::to_string(seed) + ", update " + std::to_string(update) + ")");
  }
}

}  // namespace

Context Context::for_task(const TaskPath& t) {
  Context c;
  c.v = Eigen::VectorXd::Zero(5);
  switch (t.kind) {
    case PathKind::Circle:
      c.v(0) = 1.0;
      c.v(3) = t.size1;
      break;
    case PathKind::Ellipse:
      c.v(1) = 1.0;
      c.v(3) = t.size1;
      c.v(4) = t.size2;
      break;
    case PathKind::Rectangle:
      c.v(2) = 1.0;
      c.v(3) = t.size1;
      c.v(4) = t.size2;
      break;
  }
  return c;
}

PhysicalAction map_action(const ActionSpec& spec, const Eigen::VectorXd& u) {
  if (u.size() != spec.dim()) {
    throw std::logic_error("map_action: action dimension mismatch");
  }
  PhysicalAction out;
  out.mode = spec.mode;
  if (spec.mode == ActionMode::CirclePhi) {
    const double quarter = std::numbers::pi / 4.0;
    out.phi = quarter + (quarter - kPhiEpsilon) * u(0);
    const auto [l1, l2] = phi_to_lengths(PhiParam{out.phi}, spec.circle_radius);
    out.morph = Morphology{l1, l2, std::numbers::pi / 2.0};
  } else {
    const double mid = 0.5 * (spec.l_min + spec.l_max);
    const double half = 0.5 * (spec.l_max - spec.l_min);
    out.morph.l1 = mid + half * u(0);
    out.morph.l2 = mid + half * u(1);
    out.morph.theta2_cmd = 0.5 * std::numbers::pi * (1.0 + u(2));
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    storage_.push_back(std::move(t));
    ++size_;
  } else {
    storage_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::uint32_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                        RngStream& rng) const {
  if (batch > size_) {
    throw std::logic_error("ReplayBuffer::sample_indices: batch larger than buffer");
  }
  std::vector<std::uint32_t> idx(size_);
  for (std::size_t i = 0; i < size_; ++i) idx[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t j = i + rng.uniform_index(size_ - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(batch);
  return idx;
}

namespace detail {

ActorEval sac_actor_loss_and_grad(const nn::Mlp& policy, const nn::Mlp& q1, const nn::Mlp& q2,
                                  const Eigen::MatrixXd& ctx_batch,
                                  const Eigen::MatrixXd& noise, double alpha) {
  const Eigen::Index d = noise.rows();
  const Eigen::Index b = ctx_batch.cols();

  nn::MlpCache pc;
  const Eigen::MatrixXd raw = policy.forward(ctx_batch, &pc);
  const Eigen::ArrayXXd mean = raw.topRows(d).array();
  const Eigen::ArrayXXd ls_raw = raw.bottomRows(d).array();
  const Eigen::ArrayXXd ls = ls_raw.max(nn::kLogStdMin).min(nn::kLogStdMax);
  const Eigen::ArrayXXd stddev = ls.exp();
  const Eigen::ArrayXXd u = mean + stddev * noise.array();
  const Eigen::ArrayXXd act = u.tanh();
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - act.square();

  const Eigen::ArrayXXd per_dim = -0.5 * noise.array().square() - ls - kHalfLog2Pi -
                                  (one_minus_a2 + nn::kTanhEps).log();
  const Eigen::RowVectorXd log_pi = per_dim.colwise().sum().matrix();

  Eigen::MatrixXd qin(ctx_batch.rows() + d, b);
  qin.topRows(ctx_batch.rows()) = ctx_batch;
  qin.bottomRows(d) = act.matrix();
  nn::MlpCache c1, c2;
  const Eigen::RowVectorXd q1v = q1.forward(qin, &c1).row(0);
  const Eigen::RowVectorXd q2v = q2.forward(qin, &c2).row(0);
  const Eigen::Array<bool, 1, Eigen::Dynamic> use_q1 = q1v.array() <= q2v.array();
  const Eigen::RowVectorXd q_min = use_q1.select(q1v.array(), q2v.array()).matrix();

  ActorEval out;
  out.loss = (alpha * log_pi.array() - q_min.array()).mean();

  // dQmin/da through whichever critic attains the per-sample minimum.
  const Eigen::MatrixXd sel1 = use_q1.cast<double>().matrix();
  const Eigen::MatrixXd sel2 = (1.0 - sel1.array()).matrix();
  const Eigen::MatrixXd dq_da =
      q1.backward(c1, sel1).input.bottomRows(d) + q2.backward(c2, sel2).input.bottomRows(d);

  const double inv_b = 1.0 / static_cast<double>(b);
  const Eigen::ArrayXXd dlogpi_du = 2.0 * act * one_minus_a2 / (one_minus_a2 + nn::kTanhEps);
  const Eigen::ArrayXXd d_mean =
      inv_b * (alpha * dlogpi_du - dq_da.array() * one_minus_a2);
  const Eigen::ArrayXXd clamp_mask =
      ((ls_raw > nn::kLogStdMin) && (ls_raw < nn::kLogStdMax)).cast<double>();
  const Eigen::ArrayXXd d_ls =
      (-alpha * inv_b + d_mean * stddev * noise.array()) * clamp_mask;

  Eigen::MatrixXd output_grad(2 * d, b);
  output_grad.topRows(d) = d_mean.matrix();
  output_grad.bottomRows(d) = d_ls.matrix();
  out.grads = policy.backward(pc, output_grad);
  return out;
}

ActorEval ddpg_actor_loss_and_grad(const nn::Mlp& actor, const nn::Mlp& critic,
                                   const Eigen::MatrixXd& ctx_batch) {
  const Eigen::Index b = ctx_batch.cols();
  nn::MlpCache ac;
  const Eigen::MatrixXd pre = actor.forward(ctx_batch, &ac);
  const Eigen::ArrayXXd act = pre.array().tanh();
  const Eigen::Index d = pre.rows();

  Eigen::MatrixXd qin(ctx_batch.rows() + d, b);
  qin.topRows(ctx_batch.rows()) = ctx_batch;
  qin.bottomRows(d) = act.matrix();
  nn::MlpCache cc;
  const Eigen::MatrixXd q = critic.forward(qin, &cc);

  ActorEval out;
  out.loss = -q.mean();

  const Eigen::MatrixXd q_grad =
      Eigen::MatrixXd::Constant(1, b, -1.0 / static_cast<double>(b));
  const Eigen::MatrixXd dq_da = critic.backward(cc, q_grad).input.bottomRows(d);
  const Eigen::MatrixXd d_pre = (dq_da.array() * (1.0 - act.square())).matrix();
  out.grads = actor.backward(ac, d_pre);
  return out;
}

ActorEval ppo_policy_loss_and_grad(const nn::Mlp& policy, const Eigen::MatrixXd& ctx_batch,
                                   const Eigen::MatrixXd& pre_squash,
                                   const Eigen::VectorXd& advantage,
                                   const Eigen::VectorXd& log_prob_old, double clip) {
  const Eigen::Index d = pre_squash.rows();
  const Eigen::Index b = ctx_batch.cols();

  nn::MlpCache pc;
  const Eigen::MatrixXd raw = policy.forward(ctx_batch, &pc);
  const Eigen::ArrayXXd mean = raw.topRows(d).array();
  const Eigen::ArrayXXd ls_raw = raw.bottomRows(d).array();
  const Eigen::ArrayXXd ls = ls_raw.max(nn::kLogStdMin).min(nn::kLogStdMax);
  const Eigen::ArrayXXd stddev = ls.exp();
  const Eigen::ArrayXXd z = (pre_squash.array() - mean) / stddev;
  const Eigen::ArrayXXd act = pre_squash.array().tanh();

  // tanh correction depends only on the stored sample, so it cancels in the
  // ratio's gradient but still belongs in the log-probability itself.
  const Eigen::ArrayXXd per_dim =
      -0.5 * z.square() - ls - kHalfLog2Pi - (1.0 - act.square() + nn::kTanhEps).log();
  const Eigen::RowVectorXd log_pi = per_dim.colwise().sum().matrix();

  const Eigen::ArrayXd ratio =
      (log_pi.transpose().array() - log_prob_old.array()).exp();
  const Eigen::ArrayXd ratio_clipped = ratio.max(1.0 - clip).min(1.0 + clip);
  const Eigen::ArrayXd surr1 = ratio * advantage.array();
  const Eigen::ArrayXd surr2 = ratio_clipped * advantage.array();
  const Eigen::ArrayXd objective = surr1.min(surr2);

  ActorEval out;
  out.loss = -objective.mean();

  const double inv_b = 1.0 / static_cast<double>(b);
  // d(-objective)/d(log pi): active only when the unclipped branch is the min
  const Eigen::ArrayXd d_logpi =
      (surr1 <= surr2).cast<double>() * (-inv_b) * ratio * advantage.array();

  const Eigen::ArrayXXd clamp_mask =
      ((ls_raw > nn::kLogStdMin) && (ls_raw < nn::kLogStdMax)).cast<double>();
  Eigen::MatrixXd output_grad(2 * d, b);
  output_grad.topRows(d) =
      ((z / stddev).rowwise() * d_logpi.transpose()).matrix();
  output_grad.bottomRows(d) =
      (((z.square() - 1.0).rowwise() * d_logpi.transpose()) * clamp_mask).matrix();
  out.grads = policy.backward(pc, output_grad);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SAC

SacAgent::SacAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed)
    : ctx_(std::move(ctx)), spec_(spec), cfg_(std::move(cfg)), rng_(seed),
      buffer_(cfg_.replay_capacity) {
  std::vector<int> policy_sizes{ctx_.dim()};
  policy_sizes.insert(policy_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  policy_sizes.push_back(2 * spec_.dim());
  std::vector<int> q_sizes{ctx_.dim() + spec_.dim()};
  q_sizes.insert(q_sizes.end(), cfg_.critic_hidden.begin(), cfg_.critic_hidden.end());
  q_sizes.push_back(1);

  policy_ = nn::Mlp(policy_sizes, rng_, cfg_.final_layer_scale);
  q1_ = nn::Mlp(q_sizes, rng_, 1.0, nn::Activation::Relu);
  q2_ = nn::Mlp(q_sizes, rng_, 1.0, nn::Activation::Relu);
  q1_target_ = q1_;
  q2_target_ = q2_;
  policy_opt_ = nn::Adam(policy_, cfg_.sac_lr);
  q1_opt_ = nn::Adam(q1_, cfg_.sac_lr);
  q2_opt_ = nn::Adam(q2_, cfg_.sac_lr);
}

Eigen::VectorXd SacAgent::greedy_u() const {
  const Eigen::MatrixXd raw = policy_.forward(ctx_.v);
  const nn::GaussianHead head = nn::split_gaussian_head(raw.col(0));
  return head.mean.array().tanh().matrix();
}

PhysicalAction SacAgent::greedy() const { return map_action(spec_, greedy_u()); }

void SacAgent::update() {
  const std::size_t batch = static_cast<std::size_t>(cfg_.batch);
  const auto idx = buffer_.sample_indices(batch, rng_);
  const Eigen::Index b = static_cast<Eigen::Index>(batch);
  const Eigen::Index d = spec_.dim();

  Eigen::MatrixXd ctx_batch(ctx_.dim(), b);
  Eigen::MatrixXd q_input(ctx_.dim() + d, b);
  Eigen::RowVectorXd target(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = buffer_[idx[static_cast<std::size_t>(j)]];
    ctx_batch.col(j) = t.context;
    q_input.col(j).head(ctx_.dim()) = t.context;
    q_input.col(j).tail(d) = t.action;
    target(j) = t.reward;  // single-step: the critic target is the reward
  }

  critic_mse_step(q1_, q1_opt_, q_input, target);
  critic_mse_step(q2_, q2_opt_, q_input, target);

  Eigen::MatrixXd noise(d, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) noise(i, j) = rng_.normal();
  }
  const auto actor = detail::sac_actor_loss_and_grad(policy_, q1_, q2_, ctx_batch, noise,
                                                     cfg_.sac_alpha);
  policy_opt_.step(policy_, actor.grads);

  nn::polyak_update(q1_target_, q1_, cfg_.tau);
  nn::polyak_update(q2_target_, q2_, cfg_.tau);
  ++updates_;
  require_finite(policy_.all_finite() && q1_.all_finite() && q2_.all_finite(), "sac",
                 rng_.seed(), updates_);
}

TrainRecord SacAgent::train(const RewardFn& reward) {
  TrainRecord rec;
  rec.algorithm = "sac";
  rec.seed = rng_.seed();
  rec.episodes.reserve(static_cast<std::size_t>(cfg_.episodes));
  rec.best_reward = -std::numeric_limits<double>::infinity();

  for (int ep = 0; ep < cfg_.episodes; ++ep) {
    const Eigen::MatrixXd raw = policy_.forward(ctx_.v);
    const nn::GaussianHead head = nn::split_gaussian_head(raw.col(0));
    const nn::SquashedSample s = nn::sample_squashed(head, rng_);
    const PhysicalAction phys = map_action(spec_, s.action);
    const double r = reward(phys);
    buffer_.push(Transition{ctx_.v, s.action, r});
    rec.episodes.push_back(EpisodeLog{phys, r});
    if (r > rec.best_reward) {
      rec.best_reward = r;
      rec.best_action = phys;
    }
    if (ep >= cfg_.warmup && buffer_.size() >= static_cast<std::size_t>(cfg_.batch)) update();
  }

  rec.updates = updates_;
  rec.greedy_action = greedy();
  rec.greedy_reward = reward(rec.greedy_action);
  rec.params_finite = policy_.all_finite() && q1_.all_finite() && q2_.all_finite();
  return rec;
}

// ---------------------------------------------------------------------------
// DDPG

DdpgAgent::DdpgAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed)
    : ctx_(std::move(ctx)), spec_(spec), cfg_(std::move(cfg)), rng_(seed),
      buffer_(cfg_.replay_capacity) {
  std::vector<int> actor_sizes{ctx_.dim()};
  actor_sizes.insert(actor_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  actor_sizes.push_back(spec_.dim());
  std::vector<int> q_sizes{ctx_.dim() + spec_.dim()};
  q_sizes.insert(q_sizes.end(), cfg_.critic_hidden.begin(), cfg_.critic_hidden.end());
  q_sizes.push_back(1);

  actor_ = nn::Mlp(actor_sizes, rng_, cfg_.final_layer_scale);
  critic_ = nn::Mlp(q_sizes, rng_, 1.0, nn::Activation::Relu);
  critic_target_ = critic_;
  actor_opt_ = nn::Adam(actor_, cfg_.ddpg_lr);
  critic_opt_ = nn::Adam(critic_, cfg_.ddpg_lr);
}

Eigen::VectorXd DdpgAgent::greedy_u() const {
  return actor_.forward(ctx_.v).col(0).array().tanh().matrix();
}

PhysicalAction DdpgAgent::greedy() const { return map_action(spec_, greedy_u()); }

void DdpgAgent::update() {
  const std::size_t batch = static_cast<std::size_t>(cfg_.batch);
  const auto idx = buffer_.sample_indices(batch, rng_);
  const Eigen::Index b = static_cast<Eigen::Index>(batch);
  const Eigen::Index d = spec_.dim();

  Eigen::MatrixXd ctx_batch(ctx_.dim(), b);
  Eigen::MatrixXd q_input(ctx_.dim() + d, b);
  Eigen::RowVectorXd target(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = buffer_[idx[static_cast<std::size_t>(j)]];
    ctx_batch.col(j) = t.context;
    q_input.col(j).head(ctx_.dim()) = t.context;
    q_input.col(j).tail(d) = t.action;
    target(j) = t.reward;
  }

  critic_mse_step(critic_, critic_opt_, q_input, target);
  const auto actor = detail::ddpg_actor_loss_and_grad(actor_, critic_, ctx_batch);
  actor_opt_.step(actor_, actor.grads);
  nn::polyak_update(critic_target_, critic_, cfg_.tau);
  ++updates_;
  require_finite(actor_.all_finite() && critic_.all_finite(), "ddpg", rng_.seed(), updates_);
}

TrainRecord DdpgAgent::train(const RewardFn& reward) {
  TrainRecord rec;
  rec.algorithm = "ddpg";
  rec.seed = rng_.seed();
  rec.episodes.reserve(static_cast<std::size_t>(cfg_.episodes));
  rec.best_reward = -std::numeric_limits<double>::infinity();
  const Eigen::Index d = spec_.dim();

  for (int ep = 0; ep < cfg_.episodes; ++ep) {
    const double frac = cfg_.episodes > 1 ? static_cast<double>(ep) / (cfg_.episodes - 1) : 0.0;
    const double sigma =
        cfg_.ddpg_noise_start + (cfg_.ddpg_noise_end - cfg_.ddpg_noise_start) * frac;
    Eigen::VectorXd pre = actor_.forward(ctx_.v).col(0);
    for (Eigen::Index i = 0; i < d; ++i) pre(i) += sigma * rng_.normal();
    const Eigen::VectorXd action = pre.array().tanh().matrix();
    const PhysicalAction phys = map_action(spec_, action);
    const double r = reward(phys);
    buffer_.push(Transition{ctx_.v, action, r});
    rec.episodes.push_back(EpisodeLog{phys, r});
    if (r > rec.best_reward) {
      rec.best_reward = r;
      rec.best_action = phys;
    }
    if (ep >= cfg_.warmup && buffer_.size() >= static_cast<std::size_t>(cfg_.batch)) update();
  }

  rec.updates = updates_;
  rec.greedy_action = greedy();
  rec.greedy_reward = reward(rec.greedy_action);
  rec.params_finite = actor_.all_finite() && critic_.all_finite();
  return rec;
}

// ---------------------------------------------------------------------------
// PPO

PpoAgent::PpoAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed)
    : ctx_(std::move(ctx)), spec_(spec), cfg_(std::move(cfg)), rng_(seed) {
  std::vector<int> policy_sizes{ctx_.dim()};
  policy_sizes.insert(policy_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  policy_sizes.push_back(2 * spec_.dim());
  std::vector<int> value_sizes{ctx_.dim()};
  value_sizes.insert(value_sizes.end(), cfg_.critic_hidden.begin(), cfg_.critic_hidden.end());
  value_sizes.push_back(1);

  policy_ = nn::Mlp(policy_sizes, rng_, cfg_.final_layer_scale);
  value_ = nn::Mlp(value_sizes, rng_, 1.0, nn::Activation::Relu);
  policy_opt_ = nn::Adam(policy_, cfg_.ppo_lr);
  value_opt_ = nn::Adam(value_, cfg_.ppo_lr);
}

Eigen::VectorXd PpoAgent::greedy_u() const {
  const Eigen::MatrixXd raw = policy_.forward(ctx_.v);
  const nn::GaussianHead head = nn::split_gaussian_head(raw.col(0));
  return head.mean.array().tanh().matrix();
}

PhysicalAction PpoAgent::greedy() const { return map_action(spec_, greedy_u()); }

TrainRecord PpoAgent::train(const RewardFn& reward) {
  TrainRecord rec;
  rec.algorithm = "ppo";
  rec.seed = rng_.seed();
  rec.best_reward = -std::numeric_limits<double>::infinity();

  const Eigen::Index b = cfg_.ppo_batch;
  const Eigen::Index d = spec_.dim();
  const int iterations = cfg_.episodes / cfg_.ppo_batch;
  rec.episodes.reserve(static_cast<std::size_t>(iterations) * cfg_.ppo_batch);
  const Eigen::MatrixXd ctx_batch = replicate_column(ctx_.v, b);

  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXd pre_squash(d, b);
    Eigen::VectorXd rewards(b), log_prob_old(b);
    for (Eigen::Index j = 0; j < b; ++j) {
      const Eigen::MatrixXd raw = policy_.forward(ctx_.v);
      const nn::GaussianHead head = nn::split_gaussian_head(raw.col(0));
      const nn::SquashedSample s = nn::sample_squashed(head, rng_);
      const PhysicalAction phys = map_action(spec_, s.action);
      const double r = reward(phys);
      pre_squash.col(j) = s.pre_squash;
      log_prob_old(j) = s.log_prob;
      rewards(j) = r;
      rec.episodes.push_back(EpisodeLog{phys, r});
      if (r > rec.best_reward) {
        rec.best_reward = r;
        rec.best_action = phys;
      }
    }

    // Baseline from the pre-update value net; the context is constant so a
    // single evaluation serves the whole batch.
    const double baseline = value_.forward(ctx_.v)(0, 0);
    const Eigen::VectorXd advantage = rewards.array() - baseline;

    for (int epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
      const auto perm = shuffled_indices(static_cast<std::size_t>(b), rng_);
      for (Eigen::Index start = 0; start < b; start += cfg_.ppo_minibatch) {
        const Eigen::Index count = std::min<Eigen::Index>(cfg_.ppo_minibatch, b - start);
        Eigen::MatrixXd mb_ctx(ctx_.dim(), count), mb_pre(d, count);
        Eigen::VectorXd mb_adv(count), mb_logp(count);
        Eigen::RowVectorXd mb_reward(count);
        for (Eigen::Index j = 0; j < count; ++j) {
          const auto src = perm[static_cast<std::size_t>(start + j)];
          mb_ctx.col(j) = ctx_batch.col(src);
          mb_pre.col(j) = pre_squash.col(src);
          mb_adv(j) = advantage(src);
          mb_logp(j) = log_prob_old(src);
          mb_reward(j) = rewards(src);
        }

        const auto pol = detail::ppo_policy_loss_and_grad(policy_, mb_ctx, mb_pre, mb_adv,
                                                          mb_logp, cfg_.ppo_clip);
        policy_opt_.step(policy_, pol.grads);

        nn::MlpCache vc;
        const Eigen::MatrixXd v = value_.forward(mb_ctx, &vc);
        const Eigen::MatrixXd v_grad =
            (2.0 / static_cast<double>(count)) * (v - mb_reward);
        value_opt_.step(value_, value_.backward(vc, v_grad));

        ++updates_;
        require_finite(policy_.all_finite() && value_.all_finite(), "ppo", rng_.seed(),
                       updates_);
      }
    }
  }

  rec.updates = updates_;
  rec.greedy_action = greedy();
  rec.greedy_reward = reward(rec.greedy_action);
  rec.params_finite = policy_.all_finite() && value_.all_finite();
  return rec;
}

// ---------------------------------------------------------------------------

TrainRecord train_sac(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                      std::uint64_t seed, const RlConfig& cfg) {
  return SacAgent(ctx, spec, cfg, seed).train(reward);
}

TrainRecord train_ddpg(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                       std::uint64_t seed, const RlConfig& cfg) {
  return DdpgAgent(ctx, spec, cfg, seed).train(reward);
}

TrainRecord train_ppo(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                      std::uint64_t seed, const RlConfig& cfg) {
  return PpoAgent(ctx, spec, cfg, seed).train(reward);
}

}  // namespace morph::rl
