#include "skewd/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "skewd/error.hpp"

namespace skewd {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;
// Below this argument exp(x^2) erfc(x) loses accuracy to the exponent's
// rounding; switch to the continued fraction.
constexpr double kErfcxSwitch = 5.0;

// Tail of the Laplace continued fraction
//   erfc(x) = exp(-x^2)/sqrt(pi) / (x + g),  g = (1/2)/(x + 1/(x + (3/2)/(x + ...)))
// evaluated bottom-up. Converges fast for x >= 5.
double erfc_cf_tail(double x) {
  constexpr int kTerms = 80;
  double f = x;
  for (int k = kTerms; k >= 2; --k) f = x + 0.5 * k / f;
  return 0.5 / f;
}

}  // namespace

void SkewNormalParams::validate() const {
  if (!std::isfinite(xi) || !std::isfinite(omega) || !std::isfinite(lambda) || !(omega > 0.0)) {
    throw ParameterError("skew-normal parameters must be finite with omega > 0");
  }
}

double SkewNormalParams::delta() const { return lambda / std::sqrt(1.0 + lambda * lambda); }

void GnoParams::validate() const {
  if (!std::isfinite(xi) || !std::isfinite(alpha) || !std::isfinite(k) || !(alpha > 0.0)) {
    throw ParameterError("GNO parameters must be finite with alpha > 0");
  }
}

double normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double normal_logpdf(double u) { return -kLogSqrt2Pi - 0.5 * u * u; }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / kSqrt2); }

double erfcx(double x) {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < kErfcxSwitch) return std::exp(x * x) * std::erfc(x);
  return 1.0 / (std::sqrt(std::numbers::pi) * (x + erfc_cf_tail(x)));
}

double normal_logcdf(double u) {
  if (u < -1.0) {
    const double x = -u / kSqrt2;
    return std::log(0.5 * erfcx(x)) - 0.5 * u * u;
  }
  return std::log1p(-0.5 * std::erfc(u / kSqrt2));
}

double inverse_mills(double u) {
  if (u < 0.0) return std::sqrt(2.0 / std::numbers::pi) / erfcx(-u / kSqrt2);
  return normal_pdf(u) / normal_cdf(u);
}

TruncatedMoments truncated_normal_moments(double mu, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2) || !std::isfinite(mu)) {
    throw ParameterError("truncated normal needs finite mu and sigma2 > 0");
  }
  const double sigma = std::sqrt(sigma2);
  const double u = mu / sigma;
  double w;
  double u_plus_w;  // u + W(u), computed without cancellation in the deep tail
  if (u < -kErfcxSwitch * kSqrt2) {
    const double g = erfc_cf_tail(-u / kSqrt2);
    w = -u + kSqrt2 * g;
    u_plus_w = kSqrt2 * g;
  } else {
    w = inverse_mills(u);
    u_plus_w = u + w;
  }
  const double m1 = sigma * u_plus_w;
  const double m2 = sigma2 * (1.0 + u * u_plus_w);
  return {m1, m2};
}

double sn_logpdf(double x, const SkewNormalParams& p) {
  p.validate();
  const double z = (x - p.xi) / p.omega;
  return std::numbers::ln2 - std::log(p.omega) + normal_logpdf(z) + normal_logcdf(p.lambda * z);
}

std::vector<double> sn_sample(const SkewNormalParams& p, std::size_t n, Rng& rng) {
  p.validate();
  const double delta = p.delta();
  const double ortho = std::sqrt(1.0 - delta * delta);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& v : out) {
    const double u0 = normal(rng);
    const double u1 = normal(rng);
    v = p.xi + p.omega * (delta * std::abs(u0) + ortho * u1);
  }
  return out;
}

Moments sn_moments(const SkewNormalParams& p) {
  p.validate();
  const double b = std::sqrt(2.0 / std::numbers::pi);
  const double bd = b * p.delta();
  const double v = 1.0 - bd * bd;
  const double skew = 0.5 * (4.0 - std::numbers::pi) * bd * bd * bd / std::pow(v, 1.5);
  return {p.xi + p.omega * bd, p.omega * p.omega * v, skew};
}

double gno_logpdf(double x, const GnoParams& p) {
  p.validate();
  const double z = (x - p.xi) / p.alpha;
  double y;
  if (p.k == 0.0) {
    y = z;
  } else {
    const double arg = -p.k * z;
    if (!(arg > -1.0)) return -std::numeric_limits<double>::infinity();
    y = -std::log1p(arg) / p.k;
  }
  return -kLogSqrt2Pi - std::log(p.alpha) + p.k * y - 0.5 * y * y;
}

Moments gno_moments(const GnoParams& p) {
  p.validate();
  if (p.k == 0.0) return {p.xi, p.alpha * p.alpha, 0.0};
  const double k2 = p.k * p.k;
  const double t = std::expm1(k2);
  const double mean = p.xi - p.alpha / p.k * std::expm1(0.5 * k2);
  const double var = p.alpha * p.alpha / k2 * std::exp(k2) * t;
  // 3e^{k^2} - e^{3k^2} - 2 = -t^2 (3 + t) with t = e^{k^2} - 1
  const double skew = -std::copysign(1.0, p.k) * std::sqrt(t) * (3.0 + t);
  return {mean, var, skew};
}

std::vector<double> gno_sample(const GnoParams& p, std::size_t n, Rng& rng) {
  p.validate();
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& v : out) {
    const double z = normal(rng);
    v = p.k == 0.0 ? p.xi + p.alpha * z : p.xi - p.alpha * std::expm1(-p.k * z) / p.k;
  }
  return out;
}

}  // namespace skewd
