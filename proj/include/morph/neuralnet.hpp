#pragma once

#include <Eigen/Dense>
#include <vector>

#include "morph/rng.hpp"

namespace morph::nn {

// Batches are stored column-wise: an input matrix is (width x batch).

struct LayerGrads {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct MlpGrads {
  std::vector<LayerGrads> layers;
  Eigen::MatrixXd input;  // gradient w.r.t. the forward input batch
};

struct MlpCache {
  // activations[0] is the input; activations[l] the post-activation output
  // of layer l (tanh for hidden layers, identity for the last).
  std::vector<Eigen::MatrixXd> activations;
};

enum class Activation { Tanh, Relu };

// Fully-connected network with a linear output layer. Policy heads use tanh
// hidden units; value/critic nets use relu hiddens, which fit the hinge
// structure of the band penalties much faster under a fixed step budget.
// Plain value type: copying and then updating the copy leaves the original
// untouched.
class Mlp {
 public:
  Mlp() = default;

  // Glorot uniform initialization (+-sqrt(6/(fan_in+fan_out))) for weights,
  // zero biases; entries are drawn row-by-row per layer. final_scale
  // shrinks the last layer (policy heads start near the action-box center).
  Mlp(std::vector<int> sizes, RngStream& rng, double final_scale = 1.0,
      Activation hidden = Activation::Tanh);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, MlpCache* cache = nullptr) const;

  // Exact reverse-mode gradients of forward() for the cached batch, given
  // the loss gradient at the output. Throws std::logic_error if the cache
  // does not match this network.
  MlpGrads backward(const MlpCache& cache, const Eigen::MatrixXd& output_grad) const;

  MlpGrads zero_grads() const;

  const std::vector<int>& sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return weights_.size(); }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  bool all_finite() const;

 private:
  std::vector<int> sizes_;
  Activation hidden_ = Activation::Tanh;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

// Bias-corrected Adam bound to one network's shapes.
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  void step(Mlp& net, const MlpGrads& grads);

  long step_count() const { return step_count_; }
  double learning_rate() const { return learning_rate_; }

 private:
  double learning_rate_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  long step_count_ = 0;
  std::vector<LayerGrads> m_;
  std::vector<LayerGrads> v_;
};

// target <- (1 - tau) * target + tau * online
void polyak_update(Mlp& target, const Mlp& online, double tau);

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kTanhEps = 1e-6;

// Diagonal Gaussian over pre-squash values; log_std is clamped to
// [kLogStdMin, kLogStdMax] when the head is built from raw net output.
struct GaussianHead {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
};

// Splits a raw 2d-dim net output column into mean (first half) and clamped
// log-std (second half).
GaussianHead split_gaussian_head(const Eigen::VectorXd& raw_output);

struct SquashedSample {
  Eigen::VectorXd action;      // tanh(u), componentwise in (-1, 1)
  Eigen::VectorXd pre_squash;  // u
  double log_prob = 0.0;
};

// u ~ N(mean, std), action = tanh(u); log-probability includes the tanh
// change-of-variables correction with an kTanhEps guard.
SquashedSample sample_squashed(const GaussianHead& head, RngStream& rng);

// Same sample built from externally supplied standard-normal noise (one
// entry per action dimension); used by reparameterized policy updates.
SquashedSample squash_with_noise(const GaussianHead& head, const Eigen::VectorXd& noise);

// Log-probability of a stored pre-squash value under the head.
double squashed_log_prob(const GaussianHead& head, const Eigen::VectorXd& pre_squash);

}  // namespace morph::nn
