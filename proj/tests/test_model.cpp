#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "skewd/distributions.hpp"
#include "skewd/error.hpp"
#include "skewd/model.hpp"

namespace skewd {
namespace {

struct Instance {
  DesignPair design;
  PenaltySpec pen;
  ModelParams theta;
  Eigen::VectorXd y;
};

Instance random_instance(int n, int q, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  for (auto& v : x) v = normal(rng);
  const auto basis = build_direction_basis(x, q, p);
  Instance in{basis.design(x), penalty_matrices(q, p), {}, Eigen::VectorXd(n)};
  in.theta.psi = Eigen::VectorXd(q);
  in.theta.rho = Eigen::VectorXd(p);
  for (auto& v : in.theta.psi) v = normal(rng);
  for (auto& v : in.theta.rho) v = 0.5 * normal(rng);
  in.theta.lambda = 3.0 * normal(rng);
  for (auto& v : in.y) v = 2.0 * normal(rng);
  return in;
}

TEST(ModelParams, PackRoundTrip) {
  ModelParams t{Eigen::Vector3d(1, 2, 3), Eigen::Vector2d(-1, 4), 0.5};
  const Eigen::VectorXd v = t.pack();
  ASSERT_EQ(v.size(), 6);
  const ModelParams u = ModelParams::unpack(v, 3, 2);
  EXPECT_EQ(u.psi, t.psi);
  EXPECT_EQ(u.rho, t.rho);
  EXPECT_EQ(u.lambda, 0.5);
  EXPECT_THROW(ModelParams::unpack(v, 3, 3), DimensionError);

  ModelParams wild{Eigen::Vector3d(1, 2, 3), Eigen::Vector2d(-20, 9), 40.0};
  const ModelParams c = wild.clamped();
  EXPECT_EQ(c.rho[0], kRhoLower);
  EXPECT_EQ(c.rho[1], kRhoUpper);
  EXPECT_EQ(c.lambda, kLambdaBound);
}

TEST(Predict, MatchesDenseProducts) {
  const Instance in = random_instance(25, 6, 4, 1);
  const Prediction pr = predict(in.theta, in.design);
  for (int i = 0; i < 25; ++i) {
    long double f = 0.0L, eta = 0.0L;
    for (int j = 0; j < 6; ++j) f += static_cast<long double>(in.design.location(i, j)) * in.theta.psi[j];
    for (int j = 0; j < 4; ++j) eta += static_cast<long double>(in.design.scale(i, j)) * in.theta.rho[j];
    EXPECT_NEAR(pr.location[i], static_cast<double>(f), 1e-13);
    EXPECT_NEAR(pr.scale[i], static_cast<double>(std::exp(0.5L * eta)), 1e-13);
  }
  ModelParams zero = in.theta;
  zero.psi.setZero();
  zero.rho.setZero();
  const Prediction z = predict(zero, in.design);
  EXPECT_EQ(z.location.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((z.scale.array() - 1.0).abs().maxCoeff(), 0.0);
}

TEST(ObservedLoglik, SumOfSkewNormalDensities) {
  const Instance in = random_instance(40, 6, 4, 2);
  const Prediction pr = predict(in.theta, in.design);
  double direct = 0.0;
  for (int i = 0; i < 40; ++i) direct += sn_logpdf(in.y[i], {pr.location[i], pr.scale[i], in.theta.lambda});
  EXPECT_NEAR(observed_loglik(in.theta, in.y, in.design), direct, 1e-10);
}

TEST(ObservedLoglik, GaussianCaseMatchesIndependentFormula) {
  Instance in = random_instance(50, 6, 4, 3);
  in.theta.lambda = 0.0;
  const Prediction pr = predict(in.theta, in.design);
  double gauss = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double s = pr.scale[i];
    const double r = in.y[i] - pr.location[i];
    gauss += -0.5 * std::log(2.0 * std::numbers::pi * s * s) - r * r / (2.0 * s * s);
  }
  EXPECT_NEAR(observed_loglik(in.theta, in.y, in.design), gauss, 1e-10);
}

TEST(ObservedLoglik, ZeroResidualSinglePoint) {
  const DesignPair d{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  const ModelParams t{Eigen::VectorXd::Constant(1, 0.8), Eigen::VectorXd::Constant(1, 0.6), 7.0};
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.8);
  const double g = std::exp(0.3);
  EXPECT_NEAR(observed_loglik(t, y, d), -std::log(g * std::sqrt(2.0 * std::numbers::pi)), 1e-14);
}

TEST(ObservedLoglik, DimensionMismatch) {
  const Instance in = random_instance(30, 6, 4, 4);
  EXPECT_THROW(observed_loglik(in.theta, in.y.head(10), in.design), DimensionError);
  ModelParams bad = in.theta;
  bad.psi = Eigen::VectorXd::Zero(5);
  EXPECT_THROW(observed_loglik(bad, in.y, in.design), DimensionError);
}

TEST(PenalizedLoglik, PenaltyTerms) {
  const Instance in = random_instance(30, 7, 5, 5);
  // independent second-difference sums
  double psi_pen = 0.0, rho_pen = 0.0;
  for (int j = 2; j < 7; ++j) psi_pen += std::pow(in.theta.psi[j] - 2 * in.theta.psi[j - 1] + in.theta.psi[j - 2], 2);
  for (int j = 2; j < 5; ++j) rho_pen += std::pow(in.theta.rho[j] - 2 * in.theta.rho[j - 1] + in.theta.rho[j - 2], 2);
  const double ll = observed_loglik(in.theta, in.y, in.design);
  EXPECT_NEAR(penalized_loglik(in.theta, in.y, in.design, {1.0, 1.0}, in.pen), ll - 0.5 * psi_pen - 0.5 * rho_pen, 1e-10);
  EXPECT_NEAR(penalized_loglik(in.theta, in.y, in.design, {1e-14, 1e-14}, in.pen), ll, 1e-10);

  ModelParams affine = in.theta;
  for (int j = 0; j < 7; ++j) affine.psi[j] = 1.0 + 0.5 * j;
  for (int j = 0; j < 5; ++j) affine.rho[j] = -0.2 * j;
  EXPECT_NEAR(penalty_term(affine, {3.0, 5.0}, in.pen), 0.0, 1e-12);
}

TEST(PenalizedLoglik, FiniteDifferenceGradientIsConsistent) {
  const Instance in = random_instance(60, 6, 4, 6);
  const PenaltyParams pp{1.0, 1.0};
  auto f = [&](const Eigen::VectorXd& v) {
    return penalized_loglik(ModelParams::unpack(v, 6, 4), in.y, in.design, pp, in.pen);
  };
  const Eigen::VectorXd v = in.theta.pack();
  // central differences at two step sizes agree to 1e-5 relative
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    auto diff = [&](double h) {
      Eigen::VectorXd up = v, down = v;
      up[j] += h;
      down[j] -= h;
      return (f(up) - f(down)) / (2 * h);
    };
    const double g1 = diff(1e-6);
    const double g2 = diff(1e-4);
    EXPECT_NEAR(g1, g2, 1e-5 * std::max(1.0, std::abs(g2))) << "coordinate " << j;
  }
}

TEST(CompleteData, ReducesToGaussianForm) {
  Instance in = random_instance(20, 6, 4, 7);
  in.theta.lambda = 0.0;
  in.theta.rho.setZero();
  Eigen::VectorXd v = in.y.cwiseAbs();
  const Eigen::VectorXd e = in.y - in.design.location * in.theta.psi;
  const double expected = -20.0 * std::log(std::numbers::pi) - 0.5 * e.squaredNorm() - 0.5 * v.squaredNorm();
  EXPECT_NEAR(complete_data_loglik(in.theta, in.y, v, in.design), expected, 1e-10);
  EXPECT_THROW(complete_data_loglik(in.theta, in.y, v.head(3), in.design), DimensionError);
}

TEST(CompleteData, MarginalizesToObservedDensity) {
  // integrating the joint density of (y, v) over v > 0 gives the skew-normal density
  const DesignPair d{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double lambda : {-4.0, 0.0, 2.5, 20.0}) {
    for (double y0 : {-1.5, 0.2, 2.0}) {
      const ModelParams t{Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, -0.4), lambda};
      const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, y0);
      auto joint = [&](double v) {
        return std::exp(complete_data_loglik(t, y, Eigen::VectorXd::Constant(1, v), d));
      };
      const double marginal = integrator.integrate(joint, 0.0, std::numeric_limits<double>::infinity());
      EXPECT_NEAR(marginal, std::exp(observed_loglik(t, y, d)), 1e-7) << lambda << " " << y0;
    }
  }
}

TEST(QFunction, DegenerateExpectationIsCompleteData) {
  const Instance in = random_instance(30, 6, 4, 8);
  const Eigen::VectorXd v = (in.y.array() * 0.7).abs() + 0.1;
  const double q = q_function(in.theta, in.y, in.design, v, v.cwiseProduct(v));
  EXPECT_NEAR(q - 30.0 * std::log(std::numbers::pi), complete_data_loglik(in.theta, in.y, v, in.design), 1e-9);
  EXPECT_NEAR(q_penalized(in.theta, in.y, in.design, v, v.cwiseProduct(v), {1e-15, 1e-15}, in.pen), q, 1e-9);
  EXPECT_THROW(q_function(in.theta, in.y, in.design, v.head(4), v), DimensionError);
}

TEST(QFunction, DirectEvaluation) {
  const Instance in = random_instance(15, 5, 4, 9);
  Eigen::VectorXd v1 = in.y.cwiseAbs().array() + 0.5;
  Eigen::VectorXd v2 = v1.cwiseProduct(v1).array() + 0.3;
  long double direct = 0.0L;
  for (int i = 0; i < 15; ++i) {
    long double f = 0.0L, eta = 0.0L;
    for (int j = 0; j < 5; ++j) f += static_cast<long double>(in.design.location(i, j)) * in.theta.psi[j];
    for (int j = 0; j < 4; ++j) eta += static_cast<long double>(in.design.scale(i, j)) * in.theta.rho[j];
    const long double e = in.y[i] - f;
    const long double h = std::exp(-eta);
    const long double lam = in.theta.lambda;
    direct += -eta - 0.5L * h * (v2[i] - 2.0L * lam * e * v1[i] + (1.0L + lam * lam) * e * e);
  }
  EXPECT_NEAR(q_function(in.theta, in.y, in.design, v1, v2), static_cast<double>(direct), 1e-10);
}

TEST(Residuals, Extraction) {
  const Instance in = random_instance(30, 6, 4, 10);
  const Prediction pr = predict(in.theta, in.design);
  EXPECT_LT(extract_residuals(in.theta, pr.location, in.design).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd r = extract_residuals(in.theta, in.y, in.design);
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(r[i], (in.y[i] - pr.location[i]) / pr.scale[i], 1e-13);
  ModelParams flat = in.theta;
  flat.rho.setZero();
  EXPECT_LT((extract_residuals(flat, in.y, in.design) - (in.y - pr.location)).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
}  // namespace skewd
