#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "skewd/bayesopt.hpp"
#include "skewd/hsic.hpp"
#include "skewd/model.hpp"
#include "skewd/random.hpp"

namespace skewd {

enum class Direction { XtoY, YtoX };
enum class Rule { likelihood, independence };
enum class Profile { paper, fast };

/// "x->y" / "y->x".
std::string to_string(Direction d);
std::string to_string(Rule r);
std::string to_string(Profile p);
Profile parse_profile(const std::string& name);

struct Standardized {
  Eigen::VectorXd values;
  double mean = 0.0;
  double sd = 1.0;
};

/// (v - mean) / sd with the n-1 sample standard deviation.
/// Throws DegenerateInputError for constant input.
Standardized standardize(std::span<const double> v);

/// Gaussian log-likelihood of a standardized variable under N(0, 1):
/// -(n/2) log(2 pi) - (1/2) sum v_i^2, which equals -(n/2) log(2 pi) - (n-1)/2.
double gaussian_marginal_loglik(const Eigen::VectorXd& standardized);

struct InferenceConfig {
  Profile profile = Profile::paper;
  FitConfig fit{};
  HsicConfig hsic{};
  /// Add Gaussian marginal terms to the likelihood rule (diagnostic only;
  /// they are identical across directions on standardized data).
  bool include_marginals = false;

  /// Published protocol: q=14, p=7, population 100, 5000 iterations,
  /// 8 folds, 40 + 20 Bayesian-optimization candidates.
  static InferenceConfig paper();
  /// Desk-scale budget: population 30, 500 iterations, 4 folds,
  /// 12 + 6 candidates, short CMA-ES runs inside cross-validation.
  static InferenceConfig fast();
  static InferenceConfig for_profile(Profile p);
};

struct DirectionFit {
  Direction direction = Direction::XtoY;
  /// Final ECM estimate on standardized data.
  FitResult fit;
  /// CMA-ES heuristic estimate the ECM started from.
  FitResult heuristic;
  /// Equals fit.loglik: log p(effect | cause) on the standardized scale.
  double conditional_loglik = 0.0;
  std::optional<double> residual_pvalue;
  Eigen::VectorXd cause;
  Eigen::VectorXd effect;
};

/// Estimates theta for effect = f(cause) + g(cause) N: standardizes both
/// variables, selects (alpha, kappa) by Bayesian optimization over CV scores,
/// runs the multi-start CMA-ES heuristic from the fold estimates and refines
/// with ECM. Needs n >= 50.
DirectionFit fit_direction(std::span<const double> cause, std::span<const double> effect,
                           Direction direction, const FitConfig& config, Rng& rng);

struct Decision {
  Direction inferred = Direction::XtoY;
  Rule rule = Rule::likelihood;
  double confidence = 0.0;
  bool tie = false;
  /// Evidence of the (X->Y, Y->X) sides: log-likelihoods or p-values.
  double evidence_xy = 0.0;
  double evidence_yx = 0.0;
};

/// Larger conditional log-likelihood wins; exact ties go to XtoY with tie set.
Decision decide_likelihood(const DirectionFit& fx, const DirectionFit& fy,
                           bool include_marginals = false);

/// Which estimate the residuals of the independence rule come from.
enum class EstimateSource { ecm, heuristic };

/// p-value of the HSIC test between the cause and the residuals of `fit`.
double residual_pvalue(const DirectionFit& fit, const HsicConfig& config, Rng& rng,
                       EstimateSource source = EstimateSource::ecm);

/// Larger residual-independence p-value wins; ties go to XtoY. Uses the stored
/// p-values when present, otherwise runs the test (same stream per direction).
Decision decide_independence(const DirectionFit& fx, const DirectionFit& fy,
                             const HsicConfig& config, std::uint64_t seed,
                             EstimateSource source = EstimateSource::ecm);

struct PairInference {
  DirectionFit xy;
  DirectionFit yx;
  std::optional<Decision> likelihood;
  std::optional<Decision> independence;
};

struct RuleSelection {
  bool likelihood = true;
  bool independence = true;
};

/// Fits both directions with the same derived stream (so swapping x and y
/// swaps the fits exactly) and applies the selected rules.
PairInference infer_pair(std::span<const double> x, std::span<const double> y,
                         const InferenceConfig& config, std::uint64_t seed, RuleSelection rules = {});

}  // namespace skewd
