#pragma once

#include <cstddef>
#include <vector>

#include "skewd/random.hpp"

namespace skewd {

/// Skew-normal SN(xi, omega, lambda): density (2/omega) phi(z) Phi(lambda z),
/// z = (x - xi) / omega.
struct SkewNormalParams {
  double xi = 0.0;
  double omega = 1.0;
  double lambda = 0.0;

  /// Throws ParameterError unless omega > 0 and all fields are finite.
  void validate() const;
  /// delta = lambda / sqrt(1 + lambda^2)
  double delta() const;
};

/// Generalized normal GNO(xi, alpha, k), a reparametrized three-parameter
/// lognormal. Bounded below at xi + alpha/k when k < 0, above when k > 0.
struct GnoParams {
  double xi = 0.0;
  double alpha = 1.0;
  double k = 0.0;

  void validate() const;
};

struct Moments {
  double mean;
  double variance;
  double skewness;
};

struct TruncatedMoments {
  double m1;
  double m2;
};

// Standard normal building blocks.
double normal_pdf(double u);
double normal_logpdf(double u);
double normal_cdf(double u);
/// log Phi(u), accurate in both tails.
double normal_logcdf(double u);
/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

double sn_logpdf(double x, const SkewNormalParams& p);
std::vector<double> sn_sample(const SkewNormalParams& p, std::size_t n, Rng& rng);
Moments sn_moments(const SkewNormalParams& p);

/// Returns -infinity outside the support.
double gno_logpdf(double x, const GnoParams& p);
Moments gno_moments(const GnoParams& p);
std::vector<double> gno_sample(const GnoParams& p, std::size_t n, Rng& rng);

/// Inverse Mills ratio phi(u) / Phi(u).
double inverse_mills(double u);

/// First two raw moments of N(mu, sigma2) truncated to (0, inf).
TruncatedMoments truncated_normal_moments(double mu, double sigma2);

/// Upper bound of |skewness| over all skew-normal shapes.
inline constexpr double kSkewNormalMaxSkewness = 0.99527174643;

}  // namespace skewd
