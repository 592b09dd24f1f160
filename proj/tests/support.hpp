#pragma once

// Independent numerical oracles for the tests. Nothing here calls into the
// library's own special-function code.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace skewd::oracle {

/// First two moments of N(mu, sigma^2) truncated to (0, inf), by quadrature
/// on t = v / sigma with the integrand rescaled by its maximum.
inline std::pair<double, double> truncated_moments_quadrature(double mu, double sigma) {
  const double u = mu / sigma;
  // log of the unnormalized density on t >= 0, shifted so the peak is 0
  auto log_kernel = [u](double t) {
    return u < 0.0 ? -0.5 * t * t + t * u : -0.5 * (t - u) * (t - u);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  auto integrate = [&](int power) {
    auto f = [&](double t) {
      const double k = std::exp(log_kernel(t));
      return power == 0 ? k : power == 1 ? t * k : t * t * k;
    };
    if (u <= 0.0) return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    // split at the mode so the bulk is resolved
    boost::math::quadrature::tanh_sinh<double> finite;
    return finite.integrate(f, 0.0, u) + integrator.integrate(f, u, std::numeric_limits<double>::infinity());
  };
  const double z0 = integrate(0);
  const double m1 = sigma * integrate(1) / z0;
  const double m2 = sigma * sigma * integrate(2) / z0;
  return {m1, m2};
}

/// Integral of exp(logpdf) over the real line, split at `center`.
template <class F>
double integrate_density(F logpdf, double center, double lo = -std::numeric_limits<double>::infinity(),
                         double hi = std::numeric_limits<double>::infinity()) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double x) { return std::exp(logpdf(x)); };
  double total = 0.0;
  if (std::isinf(lo)) {
    boost::math::quadrature::exp_sinh<double> es;
    total += es.integrate([&](double t) { return f(center - t); }, 0.0, std::numeric_limits<double>::infinity());
  } else {
    total += ts.integrate(f, lo, center);
  }
  if (std::isinf(hi)) {
    boost::math::quadrature::exp_sinh<double> es;
    total += es.integrate([&](double t) { return f(center + t); }, 0.0, std::numeric_limits<double>::infinity());
  } else {
    total += ts.integrate(f, center, hi);
  }
  return total;
}

struct BatchMoments {
  double mean, mean_se;
  double variance, variance_se;
  double skewness, skewness_se;
};

/// Sample mean, variance and skewness with standard errors from batch means
/// (the sample is split into `batches` equal blocks).
inline BatchMoments batch_moments(const std::vector<double>& s, int batches = 100) {
  auto moments = [](const double* p, std::size_t n) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += p[i];
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = p[i] - mean;
      m2 += d * d;
      m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    return std::array<double, 3>{mean, m2, m3 / std::pow(m2, 1.5)};
  };
  const auto whole = moments(s.data(), s.size());
  const std::size_t size = s.size() / static_cast<std::size_t>(batches);
  std::array<double, 3> sum{}, sq{};
  for (int b = 0; b < batches; ++b) {
    const auto m = moments(s.data() + b * size, size);
    for (int j = 0; j < 3; ++j) {
      sum[j] += m[j];
      sq[j] += m[j] * m[j];
    }
  }
  std::array<double, 3> se{};
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / batches;
    const double var = (sq[j] / batches - mean * mean) * batches / (batches - 1.0);
    se[j] = std::sqrt(std::max(var, 0.0) / batches);
  }
  return {whole[0], se[0], whole[1], se[1], whole[2], se[2]};
}

}  // namespace skewd::oracle
