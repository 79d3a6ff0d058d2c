#include "morph/neuralnet.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace morph::nn {

Mlp::Mlp(std::vector<int> sizes, RngStream& rng, double final_scale, Activation hidden)
    : sizes_(std::move(sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  }
  const std::size_t n_layers = sizes_.size() - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    if (l + 1 == n_layers) w *= final_scale;
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, MlpCache* cache) const {
  if (input.rows() != input_size()) {
    throw std::logic_error("Mlp::forward: input width does not match first layer");
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(weights_.size() + 1);
    cache->activations.push_back(input);
  }
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) {
      if (hidden_ == Activation::Tanh) {
        a = z.array().tanh().matrix();
      } else {
        a = z.array().max(0.0).matrix();
      }
    } else {
      a = std::move(z);
    }
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

MlpGrads Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& output_grad) const {
  if (cache.activations.size() != weights_.size() + 1) {
    throw std::logic_error("Mlp::backward: cache does not match a forward pass of this net");
  }
  for (std::size_t l = 0; l < cache.activations.size(); ++l) {
    if (cache.activations[l].rows() != sizes_[l]) {
      throw std::logic_error("Mlp::backward: cached activation width mismatch");
    }
  }
  if (output_grad.rows() != output_size() ||
      output_grad.cols() != cache.activations.back().cols()) {
    throw std::logic_error("Mlp::backward: output gradient shape mismatch");
  }

  MlpGrads grads;
  grads.layers.resize(weights_.size());
  Eigen::MatrixXd dz = output_grad;  // output layer is linear
  for (std::size_t l = weights_.size(); l-- > 0;) {
    grads.layers[l].w.noalias() = dz * cache.activations[l].transpose();
    grads.layers[l].b = dz.rowwise().sum();
    Eigen::MatrixXd da = weights_[l].transpose() * dz;
    if (l > 0) {
      // activation derivative recovered from the cached post-activation
      const auto act = cache.activations[l].array();
      if (hidden_ == Activation::Tanh) {
        dz = (da.array() * (1.0 - act.square())).matrix();
      } else {
        dz = (da.array() * (act > 0.0).cast<double>()).matrix();
      }
    } else {
      grads.input = std::move(da);
    }
  }
  return grads;
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads grads;
  grads.layers.resize(weights_.size());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    grads.layers[l].w = Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols());
    grads.layers[l].b = Eigen::VectorXd::Zero(biases_[l].size());
  }
  return grads;
}

bool Mlp::all_finite() const {
  for (const auto& w : weights_) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases_) {
    if (!b.allFinite()) return false;
  }
  return true;
}

Adam::Adam(const Mlp& net, double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  m_.resize(net.layer_count());
  v_.resize(net.layer_count());
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    m_[l].w = Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols());
    m_[l].b = Eigen::VectorXd::Zero(net.biases()[l].size());
    v_[l] = m_[l];
  }
}

void Adam::step(Mlp& net, const MlpGrads& grads) {
  if (grads.layers.size() != m_.size()) {
    throw std::logic_error("Adam::step: gradient shapes do not match the bound network");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t l = 0; l < m_.size(); ++l) {
    m_[l].w = beta1_ * m_[l].w + (1.0 - beta1_) * grads.layers[l].w;
    m_[l].b = beta1_ * m_[l].b + (1.0 - beta1_) * grads.layers[l].b;
    v_[l].w = beta2_ * v_[l].w + (1.0 - beta2_) * grads.layers[l].w.array().square().matrix();
    v_[l].b = beta2_ * v_[l].b + (1.0 - beta2_) * grads.layers[l].b.array().square().matrix();
    net.weights()[l].array() -=
        learning_rate_ * (m_[l].w.array() / bc1) / ((v_[l].w.array() / bc2).sqrt() + epsilon_);
    net.biases()[l].array() -=
        learning_rate_ * (m_[l].b.array() / bc1) / ((v_[l].b.array() / bc2).sqrt() + epsilon_);
  }
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    target.weights()[l] = (1.0 - tau) * target.weights()[l] + tau * online.weights()[l];
    target.biases()[l] = (1.0 - tau) * target.biases()[l] + tau * online.biases()[l];
  }
}

GaussianHead split_gaussian_head(const Eigen::VectorXd& raw_output) {
  if (raw_output.size() % 2 != 0) {
    throw std::logic_error("split_gaussian_head: output size must be 2 * action_dim");
  }
  const Eigen::Index d = raw_output.size() / 2;
  GaussianHead head;
  head.mean = raw_output.head(d);
  head.log_std = raw_output.tail(d).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  return head;
}

namespace {

double log_prob_of(const GaussianHead& head, const Eigen::VectorXd& u) {
  constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)
  double lp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double std = std::exp(head.log_std(i));
    const double z = (u(i) - head.mean(i)) / std;
    const double t = std::tanh(u(i));
    lp += -0.5 * z * z - head.log_std(i) - kHalfLog2Pi - std::log(1.0 - t * t + kTanhEps);
  }
  return lp;
}

}  // namespace

SquashedSample squash_with_noise(const GaussianHead& head, const Eigen::VectorXd& noise) {
  SquashedSample s;
  s.pre_squash = head.mean + head.log_std.array().exp().matrix().cwiseProduct(noise);
  s.action = s.pre_squash.array().tanh().matrix();
  s.log_prob = log_prob_of(head, s.pre_squash);
  return s;
}

SquashedSample sample_squashed(const GaussianHead& head, RngStream& rng) {
  Eigen::VectorXd noise(head.mean.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
  return squash_with_noise(head, noise);
}

double squashed_log_prob(const GaussianHead& head, const Eigen::VectorXd& pre_squash) {
  return log_prob_of(head, pre_squash);
}

}  // namespace morph::nn
