#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "skewd/random.hpp"

namespace skewd {

struct CmaConfig {
  /// Offspring per generation; 0 selects the default 4 + floor(3 ln dim).
  int population = 100;
  double initial_step = 1.0;
  int max_iters = 5000;
  /// Stop once ||m_k - m_{k - stall_window}|| < stall_tol for the distribution mean m.
  int stall_window = 25;
  double stall_tol = 1e-6;
  /// Empty, or one entry per coordinate; use +-infinity for unbounded coordinates.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct CmaResult {
  Eigen::VectorXd x_best;
  double f_best = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool stalled = false;
  /// Best-so-far objective after each generation.
  std::vector<double> best_history;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Maximizes `objective` with a (mu/mu_w, lambda)-CMA-ES: weighted
/// recombination, rank-one plus rank-mu covariance update and cumulative
/// step-size adaptation. Candidates are clipped into the box before they are
/// evaluated and the clipped point is what enters the update. Non-finite
/// objective values count as -infinity.
///
/// Throws InputError if the objective is not finite at (the clipped) x0 and
/// ConfigurationError for malformed bounds or a population below 4.
CmaResult cma_es_maximize(const Objective& objective, const Eigen::VectorXd& x0,
                          const CmaConfig& config, Rng& rng);

Eigen::VectorXd clip_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper);

}  // namespace skewd
