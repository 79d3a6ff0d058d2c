#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "morph/neuralnet.hpp"

using namespace morph;
using nn::Mlp;

namespace {

// Scalar loss L = sum(G .* forward(X)), whose exact parameter gradient is
// backward(cache, G). Finite differences of L are the oracle.
double probe_loss(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& g) {
  return (net.forward(x).array() * g.array()).sum();
}

void check_gradients(Mlp net, int batch, RngStream& rng, int probes = 100) {
  const int in = net.input_size();
  const int out = net.output_size();
  Eigen::MatrixXd x(in, batch), g(out, batch);
  for (int c = 0; c < batch; ++c) {
    for (int r = 0; r < in; ++r) x(r, c) = rng.uniform(-2.0, 2.0);
    for (int r = 0; r < out; ++r) g(r, c) = rng.uniform(-1.0, 1.0);
  }
  nn::MlpCache cache;
  net.forward(x, &cache);
  const nn::MlpGrads grads = net.backward(cache, g);

  const double h = 1e-5;
  for (int p = 0; p < probes; ++p) {
    const auto layer = rng.uniform_index(net.layer_count());
    auto& w = net.weights()[layer];
    const auto r = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(w.rows())));
    const auto c = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(w.cols())));
    const double saved = w(r, c);
    w(r, c) = saved + h;
    const double lp = probe_loss(net, x, g);
    w(r, c) = saved - h;
    const double lm = probe_loss(net, x, g);
    w(r, c) = saved;
    const double fd = (lp - lm) / (2 * h);
    const double an = grads.layers[layer].w(r, c);
    CHECK(std::abs(fd - an) <= std::max(1e-6, 1e-4 * std::abs(an)));
  }
  // every bias of the last layer too
  const std::size_t l = net.layer_count() - 1;
  for (Eigen::Index i = 0; i < net.biases()[l].size(); ++i) {
    const double saved = net.biases()[l](i);
    net.biases()[l](i) = saved + h;
    const double lp = probe_loss(net, x, g);
    net.biases()[l](i) = saved - h;
    const double lm = probe_loss(net, x, g);
    net.biases()[l](i) = saved;
    const double fd = (lp - lm) / (2 * h);
    const double an = grads.layers[l].b(i);
    CHECK(std::abs(fd - an) <= std::max(1e-6, 1e-4 * std::abs(an)));
  }
}

}  // namespace

TEST_CASE("forward basics") {
  RngStream rng(1);
  Mlp zero({3, 4, 2}, rng);
  for (auto& w : zero.weights()) w.setZero();
  const Eigen::MatrixXd y = zero.forward(Eigen::MatrixXd::Random(3, 5));
  CHECK(y.rows() == 2);
  CHECK(y.cols() == 5);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);

  // single linear layer with identity weights reproduces the input
  Mlp ident({3, 3}, rng);
  ident.weights()[0] = Eigen::MatrixXd::Identity(3, 3);
  ident.biases()[0].setZero();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 7);
  CHECK((ident.forward(x) - x).cwiseAbs().maxCoeff() < 1e-15);

  // outputs stay finite over a wide input box
  Mlp net({5, 64, 64, 3}, rng);
  for (int i = 0; i < 50; ++i) {
    Eigen::MatrixXd wide(5, 4);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 4; ++c) wide(r, c) = rng.uniform(-10.0, 10.0);
    }
    CHECK(net.forward(wide).allFinite());
  }

  CHECK_THROWS_AS(net.forward(Eigen::MatrixXd::Zero(4, 1)), std::logic_error);
}

TEST_CASE("backward matches finite differences") {
  RngStream rng(2);
  check_gradients(Mlp({4, 16, 3}, rng), 8, rng);
}

TEST_CASE("backward on every architecture the agents use") {
  RngStream rng(3);
  check_gradients(Mlp({5, 64, 64, 2}, rng, 1e-2), 4, rng, 40);  // circle policy
  check_gradients(Mlp({5, 64, 64, 6}, rng, 1e-2), 4, rng, 40);  // path policy
  check_gradients(Mlp({5, 64, 64, 1}, rng), 4, rng, 40);        // circle actor / value
  check_gradients(Mlp({5, 64, 64, 3}, rng, 1e-2), 4, rng, 40);  // path actor
  check_gradients(Mlp({6, 64, 64, 1}, rng), 4, rng, 40);        // circle critic
  check_gradients(Mlp({8, 64, 64, 1}, rng), 4, rng, 40);        // path critic
}

TEST_CASE("backward edge cases") {
  RngStream rng(4);
  Mlp net({3, 8, 2}, rng);
  nn::MlpCache cache;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 6);
  net.forward(x, &cache);

  // zero output gradient -> zero everywhere
  const nn::MlpGrads g = net.backward(cache, Eigen::MatrixXd::Zero(2, 6));
  for (const auto& layer : g.layers) {
    CHECK(layer.w.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layer.b.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(g.input.cwiseAbs().maxCoeff() == 0.0);

  // mismatched cache is rejected
  CHECK_THROWS_AS(net.backward(nn::MlpCache{}, Eigen::MatrixXd::Zero(2, 6)), std::logic_error);
}

TEST_CASE("linear least-squares gradient in closed form") {
  RngStream rng(5);
  Mlp net({3, 1}, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 32);
  const Eigen::RowVectorXd target = Eigen::RowVectorXd::Random(32);
  nn::MlpCache cache;
  const Eigen::MatrixXd y = net.forward(x, &cache);
  // L = mean((y - t)^2) => dL/dW = 2/B (y - t) X^T
  const Eigen::MatrixXd grad_out = 2.0 / 32.0 * (y - target);
  const nn::MlpGrads g = net.backward(cache, grad_out);
  const Eigen::MatrixXd expected = 2.0 / 32.0 * (y - target) * x.transpose();
  CHECK((g.layers[0].w - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("adam updates") {
  RngStream rng(6);
  Mlp net({2, 2}, rng);
  const Mlp before = net;
  nn::Adam opt(net, 1e-3);

  // zero gradient leaves parameters untouched
  opt.step(net, net.zero_grads());
  CHECK((net.weights()[0] - before.weights()[0]).cwiseAbs().maxCoeff() == 0.0);

  // constant gradient: step magnitude approaches the learning rate
  Mlp scalar({1, 1}, rng);
  scalar.weights()[0](0, 0) = 0.0;
  nn::Adam sopt(scalar, 1e-2);
  nn::MlpGrads g = scalar.zero_grads();
  g.layers[0].w(0, 0) = 0.5;
  double prev = scalar.weights()[0](0, 0);
  double last_step = 0.0;
  for (int i = 0; i < 500; ++i) {
    sopt.step(scalar, g);
    last_step = std::abs(scalar.weights()[0](0, 0) - prev);
    prev = scalar.weights()[0](0, 0);
  }
  CHECK(last_step == doctest::Approx(1e-2).epsilon(0.02));
  CHECK(scalar.weights()[0](0, 0) < 0.0);  // moved against the gradient
}

TEST_CASE("adam minimizes a shifted quadratic") {
  RngStream rng(7);
  Mlp scalar({1, 1}, rng);
  scalar.weights()[0](0, 0) = 0.0;
  scalar.biases()[0](0) = 0.0;
  nn::Adam opt(scalar, 1e-2);
  for (int i = 0; i < 5000; ++i) {
    nn::MlpGrads g = scalar.zero_grads();
    g.layers[0].w(0, 0) = 2.0 * (scalar.weights()[0](0, 0) - 3.0);
    opt.step(scalar, g);
  }
  CHECK(std::abs(scalar.weights()[0](0, 0) - 3.0) < 1e-3);
}

TEST_CASE("networks are value types") {
  RngStream rng(8);
  Mlp a({3, 8, 2}, rng);
  Mlp b = a;
  nn::Adam opt(b, 1e-2);
  nn::MlpGrads g = b.zero_grads();
  g.layers[0].w.setConstant(1.0);
  opt.step(b, g);
  CHECK((a.weights()[0] - b.weights()[0]).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.all_finite());
}

TEST_CASE("squashed gaussian head") {
  Eigen::VectorXd raw(4);
  raw << 0.3, -0.2, -9.0, 4.0;  // log-stds clamp to [-5, 2]
  const nn::GaussianHead head = nn::split_gaussian_head(raw);
  CHECK(head.mean(0) == 0.3);
  CHECK(head.log_std(0) == -5.0);
  CHECK(head.log_std(1) == 2.0);

  // vanishing std collapses onto tanh(mean); built directly since the
  // split-head path clamps log_std at -5
  nn::GaussianHead tight;
  tight.mean = Eigen::VectorXd::Constant(1, 0.7);
  tight.log_std = Eigen::VectorXd::Constant(1, -20.0);
  RngStream rng(9);
  const nn::SquashedSample s = nn::sample_squashed(tight, rng);
  CHECK(s.action(0) == doctest::Approx(std::tanh(0.7)).epsilon(1e-8));
  CHECK(std::isfinite(s.log_prob));
  CHECK(s.action(0) > -1.0);
  CHECK(s.action(0) < 1.0);
  CHECK(nn::squashed_log_prob(tight, s.pre_squash) == doctest::Approx(s.log_prob));
}

TEST_CASE("sampled squashed mean matches quadrature") {
  Eigen::VectorXd raw(2);
  raw << 0.3, -0.5;
  const nn::GaussianHead head = nn::split_gaussian_head(raw);
  const double mean = head.mean(0);
  const double std = std::exp(head.log_std(0));

  // dense midpoint quadrature of E[tanh(u)], u ~ N(mean, std)
  double quad = 0.0;
  const int n = 20001;
  const double lo = mean - 10 * std, hi = mean + 10 * std;
  for (int i = 0; i < n; ++i) {
    const double u = lo + (hi - lo) * (i + 0.5) / n;
    const double z = (u - mean) / std;
    quad += std::tanh(u) * std::exp(-0.5 * z * z);
  }
  quad *= (hi - lo) / n / (std * std::sqrt(2 * std::numbers::pi));

  RngStream rng(10);
  const int samples = 100000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double a = nn::sample_squashed(head, rng).action(0);
    acc += a;
    acc2 += a * a;
  }
  const double mc = acc / samples;
  const double var = acc2 / samples - mc * mc;
  CHECK(std::abs(mc - quad) <= 3.0 * std::sqrt(var / samples) + 1e-6);
}
