#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "skewd/splines.hpp"

namespace skewd {

/// Box used for the scale coefficients and the shape wherever they are optimized.
inline constexpr double kRhoLower = -10.0;
inline constexpr double kRhoUpper = 5.0;
inline constexpr double kLambdaBound = 25.0;

/// theta = (psi, rho, lambda) of one skew-normal location-scale model
///   y_i = n_i^T psi + exp(0.5 z_i^T rho) N_i,  N_i ~ SN(0, 1, lambda).
struct ModelParams {
  Eigen::VectorXd psi;
  Eigen::VectorXd rho;
  double lambda = 0.0;

  Eigen::Index size() const { return psi.size() + rho.size() + 1; }
  /// Concatenation (psi, rho, lambda).
  Eigen::VectorXd pack() const;
  static ModelParams unpack(const Eigen::VectorXd& v, Eigen::Index q, Eigen::Index p);
  bool all_finite() const;
  /// Clamps rho into [kRhoLower, kRhoUpper] and lambda into +-kLambdaBound.
  ModelParams clamped() const;
};

struct PenaltyParams {
  double alpha = 1.0;
  double kappa = 1.0;
};

struct FitResult {
  ModelParams theta;
  PenaltyParams penalties;
  double loglik = 0.0;
  double penalized_loglik = 0.0;
  Eigen::VectorXd residuals;
  std::size_t ecm_iterations = 0;
  bool converged = false;
  bool ridge_used = false;
};

struct Prediction {
  Eigen::VectorXd location;  // f_hat
  Eigen::VectorXd scale;     // g_hat
};

Prediction predict(const ModelParams& theta, const DesignPair& design);

double observed_loglik(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design);

/// alpha/2 psi^T K psi + kappa/2 rho^T M rho
double penalty_term(const ModelParams& theta, const PenaltyParams& penalties, const PenaltySpec& pen);

double penalized_loglik(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                        const PenaltyParams& penalties, const PenaltySpec& pen);

double complete_data_loglik(const ModelParams& theta, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& v, const DesignPair& design);

/// Expected complete-data log-likelihood given E[V | y] = v1 and E[V^2 | y] = v2,
/// without the constant -n log(pi).
double q_function(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                  const Eigen::VectorXd& v1, const Eigen::VectorXd& v2);

double q_penalized(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                   const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                   const PenaltyParams& penalties, const PenaltySpec& pen);

/// (effect - N psi) / exp(0.5 Z rho)
Eigen::VectorXd extract_residuals(const ModelParams& theta, const Eigen::VectorXd& effect,
                                  const DesignPair& design);

/// Checks the sizes of theta, y and the design against each other.
void check_dimensions(const ModelParams& theta, const DesignPair& design, Eigen::Index n);

}  // namespace skewd
