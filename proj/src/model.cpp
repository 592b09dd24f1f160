#include "skewd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skewd/distributions.hpp"
#include "skewd/error.hpp"

namespace skewd {

Eigen::VectorXd ModelParams::pack() const {
  Eigen::VectorXd v(size());
  v << psi, rho, lambda;
  return v;
}

ModelParams ModelParams::unpack(const Eigen::VectorXd& v, Eigen::Index q, Eigen::Index p) {
  if (v.size() != q + p + 1) throw DimensionError("packed parameter vector has wrong length");
  return {v.head(q), v.segment(q, p), v[q + p]};
}

bool ModelParams::all_finite() const {
  return psi.allFinite() && rho.allFinite() && std::isfinite(lambda);
}

ModelParams ModelParams::clamped() const {
  ModelParams out = *this;
  out.rho = rho.cwiseMax(kRhoLower).cwiseMin(kRhoUpper);
  out.lambda = std::clamp(lambda, -kLambdaBound, kLambdaBound);
  return out;
}

void check_dimensions(const ModelParams& theta, const DesignPair& design, Eigen::Index n) {
  if (design.location.rows() != n || design.scale.rows() != n) {
    throw DimensionError("design rows do not match the number of observations");
  }
  if (design.location.cols() != theta.psi.size() || design.scale.cols() != theta.rho.size()) {
    throw DimensionError("coefficient lengths do not match the design columns");
  }
}

Prediction predict(const ModelParams& theta, const DesignPair& design) {
  check_dimensions(theta, design, design.rows());
  return {design.location * theta.psi, (0.5 * (design.scale * theta.rho).array()).exp().matrix()};
}

double observed_loglik(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design) {
  check_dimensions(theta, design, y.size());
  const Eigen::VectorXd e = y - design.location * theta.psi;
  const Eigen::VectorXd eta = design.scale * theta.rho;
  const auto n = static_cast<double>(y.size());
  double sum = 0.5 * n * std::log(2.0 / std::numbers::pi) - 0.5 * eta.sum();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double inv_omega = std::exp(-0.5 * eta[i]);
    const double z = e[i] * inv_omega;
    sum += -0.5 * z * z + normal_logcdf(theta.lambda * z);
  }
  return sum;
}

double penalty_term(const ModelParams& theta, const PenaltyParams& penalties, const PenaltySpec& pen) {
  return 0.5 * penalties.alpha * theta.psi.dot(pen.location * theta.psi) +
         0.5 * penalties.kappa * theta.rho.dot(pen.scale * theta.rho);
}

double penalized_loglik(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                        const PenaltyParams& penalties, const PenaltySpec& pen) {
  return observed_loglik(theta, y, design) - penalty_term(theta, penalties, pen);
}

double complete_data_loglik(const ModelParams& theta, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& v, const DesignPair& design) {
  check_dimensions(theta, design, y.size());
  if (v.size() != y.size()) throw DimensionError("latent vector length differs from y");
  const Eigen::VectorXd e = y - design.location * theta.psi;
  const Eigen::VectorXd eta = design.scale * theta.rho;
  const Eigen::ArrayXd h = (-eta.array()).exp();
  const double lam = theta.lambda;
  return -static_cast<double>(y.size()) * std::log(std::numbers::pi) - eta.sum() +
         lam * (e.array() * h * v.array()).sum() -
         0.5 * (1.0 + lam * lam) * (e.array().square() * h).sum() -
         0.5 * (v.array().square() * h).sum();
}

double q_function(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                  const Eigen::VectorXd& v1, const Eigen::VectorXd& v2) {
  check_dimensions(theta, design, y.size());
  if (v1.size() != y.size() || v2.size() != y.size()) {
    throw DimensionError("conditional moment vectors differ in length from y");
  }
  const Eigen::VectorXd e = y - design.location * theta.psi;
  const Eigen::VectorXd eta = design.scale * theta.rho;
  const Eigen::ArrayXd h = (-eta.array()).exp();
  const double lam = theta.lambda;
  return -eta.sum() - 0.5 * (h * v2.array()).sum() + lam * (e.array() * h * v1.array()).sum() -
         0.5 * (1.0 + lam * lam) * (e.array().square() * h).sum();
}

double q_penalized(const ModelParams& theta, const Eigen::VectorXd& y, const DesignPair& design,
                   const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                   const PenaltyParams& penalties, const PenaltySpec& pen) {
  return q_function(theta, y, design, v1, v2) - penalty_term(theta, penalties, pen);
}

Eigen::VectorXd extract_residuals(const ModelParams& theta, const Eigen::VectorXd& effect,
                                  const DesignPair& design) {
  check_dimensions(theta, design, effect.size());
  const Eigen::ArrayXd inv_scale = (-0.5 * (design.scale * theta.rho).array()).exp();
  return ((effect - design.location * theta.psi).array() * inv_scale).matrix();
}

}  // namespace skewd
