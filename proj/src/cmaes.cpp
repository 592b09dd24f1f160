#include "skewd/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "skewd/error.hpp"

namespace skewd {

Eigen::VectorXd clip_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  if (lower.size() == 0) return x;
  return x.cwiseMax(lower).cwiseMin(upper);
}

namespace {

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

}  // namespace

CmaResult cma_es_maximize(const Objective& objective, const Eigen::VectorXd& x0,
                          const CmaConfig& config, Rng& rng) {
  const Eigen::Index dim = x0.size();
  if (dim == 0) throw ConfigurationError("CMA-ES needs at least one coordinate");
  const bool bounded = config.lower.size() != 0 || config.upper.size() != 0;
  if (bounded && (config.lower.size() != dim || config.upper.size() != dim)) {
    throw ConfigurationError("CMA-ES bounds must match the dimension");
  }
  if (bounded && (config.lower.array() > config.upper.array()).any()) {
    throw ConfigurationError("CMA-ES lower bound exceeds upper bound");
  }
  const int lambda = config.population > 0
                         ? config.population
                         : 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
  if (lambda < 4) throw ConfigurationError("CMA-ES population must be at least 4");
  if (!(config.initial_step > 0.0)) throw ConfigurationError("CMA-ES step size must be positive");

  auto clip = [&](const Eigen::VectorXd& x) {
    return bounded ? clip_to_box(x, config.lower, config.upper) : x;
  };

  CmaResult result;
  result.x_best = clip(x0);
  result.f_best = objective(result.x_best);
  result.evaluations = 1;
  if (!std::isfinite(result.f_best)) throw InputError("objective is not finite at the starting point");

  const double n = static_cast<double>(dim);
  const int mu = lambda / 2;
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  const int eigen_every = std::max(1, static_cast<int>(1.0 / ((c1 + cmu) * n * 10.0)));

  Eigen::VectorXd mean = result.x_best;
  double sigma = config.initial_step;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(dim);  // sqrt of eigenvalues
  Eigen::VectorXd path_c = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd path_s = Eigen::VectorXd::Zero(dim);

  std::normal_distribution<double> normal;
  std::deque<Eigen::VectorXd> mean_history{mean};
  Eigen::MatrixXd steps(dim, lambda);
  Eigen::MatrixXd candidates(dim, lambda);
  std::vector<double> fitness(lambda);
  std::vector<int> order(lambda);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(dim);
      for (Eigen::Index d = 0; d < dim; ++d) z[d] = normal(rng);
      Eigen::VectorXd x = clip(mean + sigma * (basis * scales.cwiseProduct(z)));
      candidates.col(k) = x;
      steps.col(k) = (x - mean) / sigma;
      fitness[k] = safe_eval(objective, x);
    }
    result.evaluations += lambda;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] > fitness[b]; });
    if (fitness[order[0]] > result.f_best) {
      result.f_best = fitness[order[0]];
      result.x_best = candidates.col(order[0]);
    }
    result.best_history.push_back(result.f_best);
    result.iterations = iter;

    Eigen::VectorXd step_w = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < mu; ++i) step_w += weights[i] * steps.col(order[i]);
    mean += sigma * step_w;
    if (bounded) mean = clip(mean);

    // C^{-1/2} step_w through the current eigendecomposition
    const Eigen::VectorXd whitened = basis * (basis.transpose() * step_w).cwiseQuotient(scales);
    path_s = (1.0 - cs) * path_s + std::sqrt(cs * (2.0 - cs) * mueff) * whitened;
    const double ps_norm = path_s.norm();
    const double hsig_bound = (1.4 + 2.0 / (n + 1.0)) * chi_n *
                              std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * iter));
    const double hsig = ps_norm < hsig_bound ? 1.0 : 0.0;
    path_c = (1.0 - cc) * path_c + hsig * std::sqrt(cc * (2.0 - cc) * mueff) * step_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < mu; ++i) {
      const auto s = steps.col(order[i]);
      rank_mu.noalias() += weights[i] * s * s.transpose();
    }
    cov = (1.0 - c1 - cmu) * cov +
          c1 * (path_c * path_c.transpose() + (1.0 - hsig) * cc * (2.0 - cc) * cov) + cmu * rank_mu;
    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    if (iter % eigen_every == 0) {
      cov = 0.5 * (cov + cov.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
      if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) break;
      basis = eig.eigenvectors();
      scales = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
    }

    mean_history.push_back(mean);
    if (static_cast<int>(mean_history.size()) > config.stall_window + 1) mean_history.pop_front();
    if (static_cast<int>(mean_history.size()) == config.stall_window + 1 &&
        (mean_history.back() - mean_history.front()).norm() < config.stall_tol) {
      result.stalled = true;
      break;
    }
    if (!std::isfinite(sigma) || sigma * scales.maxCoeff() < 1e-15 * (1.0 + mean.norm())) {
      result.stalled = true;
      break;
    }
  }
  return result;
}

}  // namespace skewd
