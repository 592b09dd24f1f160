#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "skewd/cmaes.hpp"
#include "skewd/ecm.hpp"
#include "skewd/model.hpp"
#include "skewd/random.hpp"
#include "skewd/splines.hpp"

namespace skewd {

struct BayesOptConfig {
  int folds = 8;
  int lhs_candidates = 40;
  int ei_candidates = 20;
  /// Box on (log alpha, log kappa).
  double log_lo = -4.0;
  double log_hi = 4.0;
  /// Random points scored by expected improvement per acquisition.
  int acquisition_pool = 2000;
};

/// Everything needed to fit one direction.
struct FitConfig {
  int q = 14;
  int p = 7;
  /// CMA-ES for the final heuristic fit on all data.
  CmaConfig heuristic{.population = 100, .initial_step = 1.0, .max_iters = 5000,
                      .stall_window = 25, .stall_tol = 1e-6, .lower = {}, .upper = {}};
  /// Reduced-budget CMA-ES used inside cross-validation.
  CmaConfig cv_heuristic{.population = 100, .initial_step = 1.0, .max_iters = 5000,
                         .stall_window = 25, .stall_tol = 1e-6, .lower = {}, .upper = {}};
  BayesOptConfig bayes_opt{};
  EcmConfig ecm{};
  /// Starting points for the final heuristic besides the fold estimates.
  int extra_random_starts = 0;
};

/// n x dims matrix; column d has exactly one point in each of n equal strata
/// of [lo_d, hi_d), in random order.
Eigen::MatrixXd latin_hypercube(int n, int dims, std::span<const std::pair<double, double>> ranges,
                                Rng& rng);

/// Zero-noise-ish GP regression with a Matern-5/2 kernel and constant mean.
/// Targets are standardized internally; length scale and signal variance are
/// picked from a small grid by marginal likelihood.
class GaussianProcess {
 public:
  static constexpr double kJitter = 1e-6;

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
  /// Posterior mean and standard deviation on the original target scale.
  std::pair<double, double> predict(const Eigen::VectorXd& x) const;
  double length_scale() const { return length_scale_; }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double length_scale_ = 1.0;
  double signal_var_ = 1.0;
};

/// Expected improvement over `best` for a maximization problem.
double expected_improvement(double mean, double sd, double best);

struct BayesOptTrial {
  double log_alpha;
  double log_kappa;
  double score;
};

struct BayesOptOutcome {
  std::size_t best_index = 0;
  std::vector<BayesOptTrial> trials;
};

/// Generic loop: LHS design, then EI acquisitions. `score` receives the
/// trial index and (log alpha, log kappa). Non-finite scores are kept in the
/// history but replaced by a floor for the surrogate.
BayesOptOutcome bayes_opt_maximize(const std::function<double(std::size_t, double, double)>& score,
                                   const BayesOptConfig& config, Rng& rng);

/// Least-squares style starting point: penalized LS location, constant log
/// variance scale, zero shape.
ModelParams initial_theta(const DesignPair& design, const Eigen::VectorXd& y, const PenaltySpec& pen,
                          double alpha);

/// Box for theta = (psi, rho, lambda) used by the heuristic.
std::pair<Eigen::VectorXd, Eigen::VectorXd> theta_bounds(int q, int p);

struct HeuristicFit {
  ModelParams theta;
  double penalized_loglik;
  std::size_t best_start = 0;
};

/// Multi-start CMA-ES on the penalized log-likelihood; keeps the best run.
HeuristicFit heuristic_fit(const Eigen::VectorXd& y, const DesignPair& design,
                           const PenaltyParams& penalties, const PenaltySpec& pen,
                           const std::vector<ModelParams>& starts, const CmaConfig& config, Rng& rng);

struct CvResult {
  double score;
  std::vector<ModelParams> fold_thetas;
};

/// k-fold held-out unpenalized log-likelihood per point, averaged over folds.
/// Bases are built on each training split; held-out points use extrapolation.
CvResult cv_heldout_loglik(std::span<const double> x, std::span<const double> y,
                           const PenaltyParams& penalties, int folds, const FitConfig& config,
                           Rng& rng);

struct PenaltySelection {
  PenaltyParams penalties;
  std::vector<ModelParams> warm_starts;
  BayesOptOutcome history;
};

PenaltySelection bayes_opt_penalties(std::span<const double> x, std::span<const double> y,
                                     const FitConfig& config, Rng& rng);

}  // namespace skewd
