#include "morph/blackbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace morph {

namespace {

double clamp_to(double x, const SearchSpace1D& space) {
  return std::clamp(x, space.lo, space.hi);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

OptimizerResult pso_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                             const PsoSettings& s) {
  OptimizerResult out;
  const int n = s.particles;
  std::vector<double> x(n), v(n), pbest_x(n), pbest_f(n);

  for (int i = 0; i < n; ++i) x[i] = rng.uniform(space.lo, space.hi);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-s.v_init, s.v_init);

  out.best_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    pbest_x[i] = x[i];
    pbest_f[i] = f(x[i]);
    ++out.eval_count;
    if (pbest_f[i] > out.best_f) {
      out.best_f = pbest_f[i];
      out.best_x = pbest_x[i];
    }
  }
  out.trace.emplace_back(0, out.best_f);

  for (int it = 1; it <= s.iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      const double r1 = rng.uniform01();
      const double r2 = rng.uniform01();
      v[i] = s.inertia * v[i] + s.c1 * r1 * (pbest_x[i] - x[i]) +
             s.c2 * r2 * (out.best_x - x[i]);
      x[i] = clamp_to(x[i] + v[i], space);
      const double fx = f(x[i]);
      ++out.eval_count;
      if (fx > pbest_f[i]) {
        pbest_f[i] = fx;
        pbest_x[i] = x[i];
      }
      if (fx > out.best_f) {
        out.best_f = fx;
        out.best_x = x[i];
      }
    }
    out.trace.emplace_back(it, out.best_f);
  }
  return out;
}

void GaussianProcess1D::fit(std::vector<double> x, std::vector<double> y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = kernel(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
    }
    k(i, i) += noise_;
  }
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("GaussianProcess1D: Cholesky factorization failed");
  }
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
  alpha_ = llt_.solve(yv);
  x_ = std::move(x);
}

GaussianProcess1D::Posterior GaussianProcess1D::predict(double x) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(x, x_[static_cast<std::size_t>(i)]);
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double variance = std::max(0.0, signal_variance_ - v.squaredNorm());
  return Posterior{mean, variance};
}

double GaussianProcess1D::kernel(double a, double b) const {
  const double d = (a - b) / lengthscale_;
  return signal_variance_ * std::exp(-0.5 * d * d);
}

double expected_improvement(double mean, double stddev, double f_best, double xi) {
  const double gain = mean - f_best - xi;
  if (stddev <= 1e-12) return 0.0;
  const double z = gain / stddev;
  return std::max(0.0, gain * norm_cdf(z) + stddev * norm_pdf(z));
}

OptimizerResult bo_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                            const BoSettings& s) {
  OptimizerResult out;
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(s.init_points + s.iterations));
  ys.reserve(xs.capacity());

  out.best_f = -std::numeric_limits<double>::infinity();
  auto observe = [&](double x) {
    const double y = f(x);
    ++out.eval_count;
    xs.push_back(x);
    ys.push_back(y);
    if (y > out.best_f) {
      out.best_f = y;
      out.best_x = x;
    }
  };

  for (int i = 0; i < s.init_points; ++i) observe(rng.uniform(space.lo, space.hi));
  out.trace.emplace_back(0, out.best_f);

  std::vector<double> grid(static_cast<std::size_t>(s.grid_points));
  for (int i = 0; i < s.grid_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        space.lo + (space.hi - space.lo) * i / (s.grid_points - 1);
  }

  GaussianProcess1D gp(s.lengthscale, s.signal_variance, s.noise);
  for (int it = 1; it <= s.iterations; ++it) {
    gp.fit(xs, ys);
    double best_ei = -1.0;
    double best_candidate = grid.front();
    double best_mean = -std::numeric_limits<double>::infinity();
    double best_mean_x = grid.front();
    for (const double x : grid) {
      const auto post = gp.predict(x);
      const double ei = expected_improvement(post.mean, std::sqrt(post.variance), out.best_f, s.xi);
      if (ei > best_ei) {
        best_ei = ei;
        best_candidate = x;
      }
      if (post.mean > best_mean) {
        best_mean = post.mean;
        best_mean_x = x;
      }
    }
    // Once the posterior is confident everywhere, EI underflows to zero on
    // the whole grid and its argmax is meaningless; fall back to pure
    // exploitation of the posterior mean.
    observe(best_ei > 0.0 ? best_candidate : best_mean_x);
    out.trace.emplace_back(it, out.best_f);
  }
  return out;
}

OptimizerResult cmaes_optimize(const Objective1D& f, const SearchSpace1D& space, RngStream& rng,
                               const CmaesSettings& s) {
  if (s.mu < 1 || s.mu > s.lambda) {
    throw std::invalid_argument("cmaes_optimize: need 1 <= mu <= lambda");
  }
  // Log-decreasing recombination weights over the mu best samples.
  std::vector<double> weights(static_cast<std::size_t>(s.mu));
  double wsum = 0.0;
  for (int i = 0; i < s.mu; ++i) {
    weights[static_cast<std::size_t>(i)] = std::log(s.mu + 0.5) - std::log(i + 1.0);
    wsum += weights[static_cast<std::size_t>(i)];
  }
  for (double& w : weights) w /= wsum;

  const double span = space.hi - space.lo;
  double mean = 0.5 * (space.lo + space.hi);
  double sigma = s.sigma0_frac * span;

  OptimizerResult out;
  out.best_f = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> scored(static_cast<std::size_t>(s.lambda));  // (f, x)

  for (int it = 1; it <= s.iterations; ++it) {
    for (int i = 0; i < s.lambda; ++i) {
      const double x = clamp_to(mean + sigma * rng.normal(), space);
      const double fx = f(x);
      ++out.eval_count;
      scored[static_cast<std::size_t>(i)] = {fx, x};
      if (fx > out.best_f) {
        out.best_f = fx;
        out.best_x = x;
      }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const double old_mean = mean;
    mean = 0.0;
    double rank_mu_var = 0.0;
    for (int i = 0; i < s.mu; ++i) {
      const double xi = scored[static_cast<std::size_t>(i)].second;
      mean += weights[static_cast<std::size_t>(i)] * xi;
      const double d = xi - old_mean;
      rank_mu_var += weights[static_cast<std::size_t>(i)] * d * d;
    }
    const double var = (1.0 - s.c_mu) * sigma * sigma + s.c_mu * rank_mu_var;
    sigma = std::clamp(std::sqrt(var), s.sigma_min, s.sigma_max_frac * span);
    out.trace.emplace_back(it, out.best_f);
  }
  return out;
}

}  // namespace morph
