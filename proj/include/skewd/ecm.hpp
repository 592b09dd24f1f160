#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "skewd/cmaes.hpp"
#include "skewd/model.hpp"
#include "skewd/random.hpp"

namespace skewd {

/// E[V | y] and E[V^2 | y] for the latent truncated-normal variable of every
/// observation.
struct LatentMoments {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;
};

struct EcmState {
  ModelParams theta;
  LatentMoments latent;
  std::size_t iteration = 0;
  double last_penalized_loglik = 0.0;
};

struct EcmConfig {
  int max_iters = 5000;
  double tol = 1e-6;
  /// Cap iterations at budget / n when nonzero.
  std::size_t budget = 0;
  /// Inner CMA-ES for the scale coefficients. Bounds are filled in from the
  /// rho box when left empty.
  CmaConfig scale_search{.population = 0, .initial_step = 0.1, .max_iters = 1000,
                         .stall_window = 25, .stall_tol = 1e-8, .lower = {}, .upper = {}};
  /// Ablation: use the freshly updated psi in the shape update.
  bool shape_uses_updated_location = false;
  bool record_trace = false;
};

LatentMoments e_step(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design);

struct LocationShapeUpdate {
  Eigen::VectorXd psi;
  double lambda = 0.0;
  bool ridge_used = false;
};

/// Closed-form conditional maximization of Q_p over psi (given lambda^(k))
/// and over lambda (given psi^(k), or the new psi when requested).
LocationShapeUpdate cm_step1(const ModelParams& theta, const Eigen::VectorXd& y,
                             const DesignPair& design, const Eigen::VectorXd& v1,
                             const PenaltyParams& penalties, const PenaltySpec& pen,
                             bool shape_uses_updated_location = false);

struct ScaleUpdate {
  Eigen::VectorXd rho;
  bool accepted = false;
};

/// Maximizes Q_p over rho with psi and lambda fixed, by CMA-ES started at the
/// current rho. The candidate replaces rho only if it improves Q_p.
ScaleUpdate cm_step2(const Eigen::VectorXd& psi, double lambda, const Eigen::VectorXd& rho,
                     const Eigen::VectorXd& y, const DesignPair& design, const LatentMoments& latent,
                     const PenaltyParams& penalties, const PenaltySpec& pen,
                     const CmaConfig& config, Rng& rng);

struct EcmOutcome {
  FitResult fit;
  /// Penalized observed log-likelihood at theta_0, theta_1, ... when recorded.
  std::vector<double> trace;
};

/// Runs E-step / CM-step 1 / CM-step 2 until ||theta_{k+1} - theta_k|| < tol
/// or the iteration cap. Throws InputError if the likelihood at theta0 is not finite.
EcmOutcome ecm_fit(const ModelParams& theta0, const Eigen::VectorXd& y, const DesignPair& design,
                   const PenaltyParams& penalties, const PenaltySpec& pen, const EcmConfig& config,
                   Rng& rng);

/// Fills in a FitResult (likelihoods, residuals) for a given theta.
FitResult summarize_fit(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                        const PenaltyParams& penalties, const PenaltySpec& pen);

}  // namespace skewd
