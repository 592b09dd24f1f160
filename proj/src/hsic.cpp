#include "skewd/hsic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "skewd/error.hpp"

namespace skewd {

namespace {

constexpr std::size_t kMaxBandwidthPoints = 1000;

Eigen::MatrixXd gaussian_gram(std::span<const double> v, double bandwidth) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd k(n, n);
  const double scale = -0.5 / (bandwidth * bandwidth);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = v[i] - v[j];
      k(i, j) = k(j, i) = std::exp(scale * d * d);
    }
  }
  return k;
}

Eigen::MatrixXd center(const Eigen::MatrixXd& k) {
  const Eigen::VectorXd means = k.rowwise().mean();
  const double grand = means.mean();
  Eigen::MatrixXd c = k;
  c.colwise() -= means;
  c.rowwise() -= means.transpose();
  c.array() += grand;
  return c;
}

}  // namespace

double median_bandwidth(std::span<const double> v) {
  std::vector<double> pts;
  if (v.size() > kMaxBandwidthPoints) {
    const double stride = static_cast<double>(v.size()) / kMaxBandwidthPoints;
    for (std::size_t i = 0; i < kMaxBandwidthPoints; ++i) pts.push_back(v[static_cast<std::size_t>(i * stride)]);
  } else {
    pts.assign(v.begin(), v.end());
  }
  std::vector<double> dists;
  dists.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) dists.push_back(std::abs(pts[i] - pts[j]));
  }
  if (dists.empty()) throw DegenerateInputError("bandwidth needs at least two points");
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  double med = *mid;
  if (med <= 0.0) {
    // heavy ties: fall back to the mean of the nonzero distances
    double sum = 0.0;
    std::size_t count = 0;
    for (double d : dists) {
      if (d > 0.0) {
        sum += d;
        ++count;
      }
    }
    if (count == 0) throw DegenerateInputError("constant input has zero kernel variance");
    med = sum / static_cast<double>(count);
  }
  return med;
}

HsicResult hsic_test(std::span<const double> a, std::span<const double> b, HsicMethod method,
                     int num_permutations, Rng& rng) {
  if (a.size() != b.size()) throw DimensionError("HSIC inputs differ in length");
  if (a.size() < 20) throw DimensionError("HSIC test needs at least 20 observations");
  if (method == HsicMethod::permutation && num_permutations < 1) {
    throw ConfigurationError("permutation test needs at least one permutation");
  }
  const auto n = static_cast<Eigen::Index>(a.size());
  const double nd = static_cast<double>(n);

  HsicResult out;
  out.method = method;
  out.bandwidth_a = median_bandwidth(a);
  out.bandwidth_b = median_bandwidth(b);
  const Eigen::MatrixXd k = gaussian_gram(a, out.bandwidth_a);
  const Eigen::MatrixXd l = gaussian_gram(b, out.bandwidth_b);
  const Eigen::MatrixXd kc = center(k);
  const Eigen::MatrixXd lc = center(l);
  const double trace_sum = (kc.array() * lc.array()).sum();
  out.statistic = std::max(trace_sum / (nd * nd), 0.0);

  if (method == HsicMethod::gamma) {
    const double test_stat = trace_sum / nd;
    Eigen::ArrayXXd var_terms = (kc.array() * lc.array() / 6.0).square();
    const double var_sum = var_terms.sum() - var_terms.matrix().diagonal().sum();
    double var_hsic = var_sum / (nd * (nd - 1.0));
    var_hsic *= 72.0 * (nd - 4.0) * (nd - 5.0) / (nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0));
    const double mu_k = (k.sum() - nd) / (nd * (nd - 1.0));
    const double mu_l = (l.sum() - nd) / (nd * (nd - 1.0));
    const double mean_hsic = (1.0 + mu_k * mu_l - mu_k - mu_l) / nd;
    if (!(var_hsic > 0.0) || !(mean_hsic > 0.0)) {
      out.p_value = 1.0;
      return out;
    }
    const double shape = mean_hsic * mean_hsic / var_hsic;
    const double scale = var_hsic * nd / mean_hsic;
    out.p_value = test_stat <= 0.0 ? 1.0 : boost::math::gamma_q(shape, test_stat / scale);
    out.p_value = std::clamp(out.p_value, 0.0, 1.0);
    return out;
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  int exceed = 0;
  for (int r = 0; r < num_permutations; ++r) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index pj = perm[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) s += kc(i, j) * lc(perm[static_cast<std::size_t>(i)], pj);
    }
    if (s >= trace_sum) ++exceed;
  }
  out.p_value = (1.0 + exceed) / (1.0 + num_permutations);
  return out;
}

}  // namespace skewd
