#pragma once

#include <Eigen/Dense>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "morph/kinematics.hpp"
#include "morph/rng.hpp"

namespace morph {

struct SearchSpace1D {
  double lo = kPhiEpsilon;
  double hi = std::numbers::pi / 2.0 - kPhiEpsilon;
};

struct OptimizerResult {
  double best_x = 0.0;
  double best_f = 0.0;
  long eval_count = 0;
  // (iteration, best-so-far objective); iteration 0 is the initial batch.
  std::vector<std::pair<int, double>> trace;
};

using Objective1D = std::function<double(double)>;

struct PsoSettings {
  int particles = 30;
  int iterations = 120;
  double inertia = 0.72;
  double c1 = 1.49;
  double c2 = 1.49;
  double v_init = 0.05;  // initial velocities ~ U[-v_init, v_init]
};

struct BoSettings {
  int init_points = 5;
  int iterations = 40;
  int grid_points = 2000;
  double lengthscale = 0.12;
  double signal_variance = 1.0;
  double noise = 1e-10;
  double xi = 0.01;
};

struct CmaesSettings {
  int lambda = 12;
  int mu = 6;
  int iterations = 60;
  double sigma0_frac = 0.20;      // sigma_0 = frac * (hi - lo)
  double c_mu = 0.5;              // scalar rank-mu learning rate
  double sigma_min = 1e-4;
  double sigma_max_frac = 0.5;    // sigma <= frac * (hi - lo)
};

// Global-best particle swarm on a 1-D box. Draw order is part of the
// contract: all positions, then all velocities at init; per particle r1
// before r2 inside each iteration. Total evaluations:
// particles * (1 + iterations).
OptimizerResult pso_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                             const PsoSettings& s = {});

// GP surrogate with a squared-exponential kernel and expected-improvement
// acquisition maximized on a fixed uniform grid inside the bounds. Total
// evaluations: init_points + iterations.
OptimizerResult bo_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                            const BoSettings& s = {});

// (mu/mu_w, lambda) evolution strategy collapsed to one dimension:
// log-decreasing recombination weights, scalar rank-mu variance update,
// elitist best-ever result. Total evaluations: lambda * iterations.
OptimizerResult cmaes_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                               const CmaesSettings& s = {});

// Zero-mean GP regressor on scalars, used by bo_optimize and exposed for
// direct checks. fit() factorizes the jittered kernel matrix and throws
// std::runtime_error if the Cholesky factorization fails.
class GaussianProcess1D {
 public:
  GaussianProcess1D(double lengthscale, double signal_variance, double noise)
      : lengthscale_(lengthscale), signal_variance_(signal_variance), noise_(noise) {}

  void fit(std::vector<double> x, std::vector<double> y);

  struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
  };
  Posterior predict(double x) const;

 private:
  double kernel(double a, double b) const;

  double lengthscale_;
  double signal_variance_;
  double noise_;
  std::vector<double> x_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

// EI for maximization with exploration offset xi; zero when stddev is zero.
double expected_improvement(double mean, double stddev, double f_best, double xi);

}  // namespace morph
