#include "skewd/ecm.hpp"

#include <algorithm>
#include <cmath>

#include "skewd/distributions.hpp"
#include "skewd/error.hpp"

namespace skewd {

LatentMoments e_step(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design) {
  check_dimensions(theta, design, y.size());
  const Eigen::VectorXd e = y - design.location * theta.psi;
  const Eigen::VectorXd eta = design.scale * theta.rho;
  LatentMoments out{Eigen::VectorXd(y.size()), Eigen::VectorXd(y.size())};
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const auto m = truncated_normal_moments(theta.lambda * e[i], std::exp(eta[i]));
    out.v1[i] = m.m1;
    out.v2[i] = m.m2;
  }
  return out;
}

LocationShapeUpdate cm_step1(const ModelParams& theta, const Eigen::VectorXd& y,
                             const DesignPair& design, const Eigen::VectorXd& v1,
                             const PenaltyParams& penalties, const PenaltySpec& pen,
                             bool shape_uses_updated_location) {
  check_dimensions(theta, design, y.size());
  if (v1.size() != y.size()) throw DimensionError("E[V|y] length differs from y");
  const Eigen::MatrixXd& basis = design.location;
  const Eigen::VectorXd h = (-(design.scale * theta.rho).array()).exp().matrix();
  const double lam = theta.lambda;
  const double shrink = 1.0 / (1.0 + lam * lam);

  const Eigen::MatrixXd weighted = h.asDiagonal() * basis;  // H N
  Eigen::MatrixXd system = basis.transpose() * weighted + penalties.alpha * shrink * pen.location;
  const Eigen::VectorXd rhs = weighted.transpose() * (y - lam * shrink * v1);

  LocationShapeUpdate out;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    const auto q = system.rows();
    double jitter = 1e-10 * system.trace() / static_cast<double>(q);
    for (int attempt = 0; attempt < 16 && llt.info() != Eigen::Success; ++attempt, jitter *= 10.0) {
      llt.compute(system + jitter * Eigen::MatrixXd::Identity(q, q));
    }
    if (llt.info() != Eigen::Success) throw Error("CM-step 1 system is not positive definite");
    out.ridge_used = true;
  }
  out.psi = llt.solve(rhs);

  const Eigen::VectorXd e = y - basis * (shape_uses_updated_location ? out.psi : theta.psi);
  const double num = (e.array() * h.array() * v1.array()).sum();
  const double den = (e.array().square() * h.array()).sum();
  out.lambda = den > 0.0 ? std::clamp(num / den, -kLambdaBound, kLambdaBound) : lam;
  return out;
}

ScaleUpdate cm_step2(const Eigen::VectorXd& psi, double lambda, const Eigen::VectorXd& rho,
                     const Eigen::VectorXd& y, const DesignPair& design, const LatentMoments& latent,
                     const PenaltyParams& penalties, const PenaltySpec& pen,
                     const CmaConfig& config, Rng& rng) {
  const Eigen::VectorXd e = y - design.location * psi;
  // Q_p(rho) = -sum z_i^T rho - 1/2 sum exp(-z_i^T rho) c_i - kappa/2 rho^T M rho
  const Eigen::ArrayXd c = latent.v2.array() - 2.0 * lambda * e.array() * latent.v1.array() +
                           (1.0 + lambda * lambda) * e.array().square();
  const Eigen::MatrixXd& z = design.scale;
  const Eigen::MatrixXd& m = pen.scale;
  const double kappa = penalties.kappa;
  auto objective = [&](const Eigen::VectorXd& r) {
    const Eigen::ArrayXd eta = (z * r).array();
    return -eta.sum() - 0.5 * ((-eta).exp() * c).sum() - 0.5 * kappa * r.dot(m * r);
  };

  CmaConfig cfg = config;
  if (cfg.lower.size() == 0) {
    cfg.lower = Eigen::VectorXd::Constant(rho.size(), kRhoLower);
    cfg.upper = Eigen::VectorXd::Constant(rho.size(), kRhoUpper);
  }
  const Eigen::VectorXd start = clip_to_box(rho, cfg.lower, cfg.upper);
  const double current = objective(start);
  const CmaResult best = cma_es_maximize(objective, start, cfg, rng);
  if (best.f_best > current) return {best.x_best, true};
  return {start, false};
}

FitResult summarize_fit(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                        const PenaltyParams& penalties, const PenaltySpec& pen) {
  FitResult fit;
  fit.theta = theta;
  fit.penalties = penalties;
  fit.loglik = observed_loglik(theta, y, design);
  fit.penalized_loglik = fit.loglik - penalty_term(theta, penalties, pen);
  fit.residuals = extract_residuals(theta, y, design);
  return fit;
}

EcmOutcome ecm_fit(const ModelParams& theta0, const Eigen::VectorXd& y, const DesignPair& design,
                   const PenaltyParams& penalties, const PenaltySpec& pen, const EcmConfig& config,
                   Rng& rng) {
  if (!theta0.all_finite()) throw InputError("ECM start contains non-finite parameters");
  check_dimensions(theta0, design, y.size());
  const double start_value = penalized_loglik(theta0, y, design, penalties, pen);
  if (!std::isfinite(start_value)) throw InputError("penalized log-likelihood is not finite at the ECM start");

  int max_iters = config.max_iters;
  if (config.budget > 0) {
    max_iters = std::min<long>(max_iters, static_cast<long>(config.budget / static_cast<std::size_t>(y.size())));
    max_iters = std::max(max_iters, 1);
  }

  EcmOutcome out;
  if (config.record_trace) out.trace.push_back(start_value);
  ModelParams theta = theta0;
  bool converged = false;
  bool ridge_used = false;
  int iter = 0;
  while (iter < max_iters) {
    ++iter;
    const LatentMoments latent = e_step(theta, y, design);
    const auto step1 = cm_step1(theta, y, design, latent.v1, penalties, pen,
                                config.shape_uses_updated_location);
    ridge_used = ridge_used || step1.ridge_used;
    const auto step2 = cm_step2(step1.psi, step1.lambda, theta.rho, y, design, latent, penalties,
                                pen, config.scale_search, rng);
    ModelParams next{step1.psi, step2.rho, step1.lambda};
    const double change = (next.pack() - theta.pack()).norm();
    theta = std::move(next);
    if (config.record_trace) out.trace.push_back(penalized_loglik(theta, y, design, penalties, pen));
    if (change < config.tol) {
      converged = true;
      break;
    }
  }

  out.fit = summarize_fit(theta, y, design, penalties, pen);
  out.fit.ecm_iterations = static_cast<std::size_t>(iter);
  out.fit.converged = converged;
  out.fit.ridge_used = ridge_used;
  return out;
}

}  // namespace skewd
