#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "morph/kinematics.hpp"
#include "morph/neuralnet.hpp"
#include "morph/rng.hpp"
#include "morph/taskpaths.hpp"

namespace morph::rl {

// Task context fed to every network: one-hot path kind (3) followed by the
// two size parameters normalized by 1 m. Constant within an experiment.
struct Context {
  Eigen::VectorXd v;

  static Context for_task(const TaskPath& t);
  int dim() const { return static_cast<int>(v.size()); }
};

enum class ActionMode { CirclePhi, FullMorphology };

// Physical meaning of the tanh-squashed action vector u in (-1,1)^d.
//   CirclePhi (d=1):     phi = pi/4 + (pi/4 - kPhiEpsilon) * u, links on the
//                        radius locus, elbow fixed at pi/2.
//   FullMorphology (d=3): links affine into [l_min, l_max], elbow command
//                        affine into (0, pi).
struct ActionSpec {
  ActionMode mode = ActionMode::CirclePhi;
  double circle_radius = 0.40;
  double l_min = 0.05;
  double l_max = 0.60;

  int dim() const { return mode == ActionMode::CirclePhi ? 1 : 3; }
};

struct PhysicalAction {
  ActionMode mode = ActionMode::CirclePhi;
  double phi = 0.0;  // meaningful for CirclePhi only
  Morphology morph;
};

PhysicalAction map_action(const ActionSpec& spec, const Eigen::VectorXd& u);

struct Transition {
  Eigen::VectorXd context;
  Eigen::VectorXd action;  // squashed action in (-1,1)^d
  double reward = 0.0;
};

// Ring buffer of single-step transitions (no next state, no bootstrap).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

  // Uniform sample without replacement; consumes exactly `batch` rng draws.
  std::vector<std::uint32_t> sample_indices(std::size_t batch, RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> storage_;
};

struct EpisodeLog {
  PhysicalAction action;
  double reward = 0.0;
};

struct TrainRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<EpisodeLog> episodes;
  PhysicalAction best_action;  // highest reward observed during training
  double best_reward = 0.0;
  PhysicalAction greedy_action;  // deterministic policy output after training
  double greedy_reward = 0.0;
  long updates = 0;
  bool params_finite = true;
};

struct RlConfig {
  int episodes = 5000;
  int batch = 256;    // replay batch (SAC, DDPG)
  int warmup = 256;   // episodes stored before the first gradient step
  std::size_t replay_capacity = 100000;
  double gamma = 0.99;  // carried for configuration fidelity; single-step
                        // episodes make every target exactly the reward, so
                        // gamma never enters an update
  double tau = 0.005;
  std::vector<int> hidden = {64, 64};         // policy/actor nets, tanh
  std::vector<int> critic_hidden = {192, 192};  // critic/value nets, relu
  double final_layer_scale = 1e-2;

  double sac_lr = 3e-4;
  double sac_alpha = 0.2;

  double ddpg_lr = 1e-3;
  double ddpg_noise_start = 0.1;  // stddev on the pre-squash action
  double ddpg_noise_end = 0.01;   // linear decay target at the last episode

  int ppo_batch = 128;
  int ppo_epochs = 10;
  int ppo_minibatch = 32;
  double ppo_lr = 3e-4;
  double ppo_clip = 0.2;
};

// Immediate reward of one executed design; must be pure.
using RewardFn = std::function<double(const PhysicalAction&)>;

namespace detail {

struct ActorEval {
  double loss = 0.0;
  nn::MlpGrads grads;
};

// Reparameterized SAC actor objective mean(alpha*log pi - min(Q1,Q2)) for a
// fixed noise batch, with exact gradients w.r.t. the policy parameters.
ActorEval sac_actor_loss_and_grad(const nn::Mlp& policy, const nn::Mlp& q1, const nn::Mlp& q2,
                                  const Eigen::MatrixXd& ctx_batch,
                                  const Eigen::MatrixXd& noise, double alpha);

// Deterministic-policy objective -mean(Q(ctx, tanh(actor(ctx)))).
ActorEval ddpg_actor_loss_and_grad(const nn::Mlp& actor, const nn::Mlp& critic,
                                   const Eigen::MatrixXd& ctx_batch);

// Clipped-surrogate objective -mean(min(ratio*A, clip(ratio)*A)) at fixed
// stored pre-squash samples.
ActorEval ppo_policy_loss_and_grad(const nn::Mlp& policy, const Eigen::MatrixXd& ctx_batch,
                                   const Eigen::MatrixXd& pre_squash,
                                   const Eigen::VectorXd& advantage,
                                   const Eigen::VectorXd& log_prob_old, double clip);

}  // namespace detail

class SacAgent {
 public:
  SacAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed);

  TrainRecord train(const RewardFn& reward);
  Eigen::VectorXd greedy_u() const;
  PhysicalAction greedy() const;

 private:
  void update();

  Context ctx_;
  ActionSpec spec_;
  RlConfig cfg_;
  RngStream rng_;
  nn::Mlp policy_, q1_, q2_, q1_target_, q2_target_;
  nn::Adam policy_opt_, q1_opt_, q2_opt_;
  ReplayBuffer buffer_;
  long updates_ = 0;
};

class DdpgAgent {
 public:
  DdpgAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed);

  TrainRecord train(const RewardFn& reward);
  Eigen::VectorXd greedy_u() const;
  PhysicalAction greedy() const;

 private:
  void update();

  Context ctx_;
  ActionSpec spec_;
  RlConfig cfg_;
  RngStream rng_;
  nn::Mlp actor_, critic_, critic_target_;
  nn::Adam actor_opt_, critic_opt_;
  ReplayBuffer buffer_;
  long updates_ = 0;
};

class PpoAgent {
 public:
  PpoAgent(Context ctx, ActionSpec spec, RlConfig cfg, std::uint64_t seed);

  TrainRecord train(const RewardFn& reward);
  Eigen::VectorXd greedy_u() const;
  PhysicalAction greedy() const;

 private:
  Context ctx_;
  ActionSpec spec_;
  RlConfig cfg_;
  RngStream rng_;
  nn::Mlp policy_, value_;
  nn::Adam policy_opt_, value_opt_;
  long updates_ = 0;
};

TrainRecord train_sac(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                      std::uint64_t seed, const RlConfig& cfg = {});
TrainRecord train_ddpg(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                       std::uint64_t seed, const RlConfig& cfg = {});
TrainRecord train_ppo(const RewardFn& reward, const Context& ctx, const ActionSpec& spec,
                      std::uint64_t seed, const RlConfig& cfg = {});

}  // namespace morph::rl
