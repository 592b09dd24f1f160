#pragma once

#include <span>

#include "skewd/random.hpp"

namespace skewd {

enum class HsicMethod { gamma, permutation };

struct HsicResult {
  /// Biased V-statistic HSIC_b = tr(K H L H) / n^2.
  double statistic = 0.0;
  double p_value = 1.0;
  HsicMethod method = HsicMethod::gamma;
  double bandwidth_a = 1.0;
  double bandwidth_b = 1.0;
};

struct HsicConfig {
  HsicMethod method = HsicMethod::gamma;
  int num_permutations = 500;
};

/// Median pairwise distance (on at most 1000 evenly spaced points).
/// Throws DegenerateInputError when all points coincide.
double median_bandwidth(std::span<const double> v);

/// HSIC independence test with Gaussian kernels and median-heuristic
/// bandwidths. Needs n >= 20 and non-constant inputs.
HsicResult hsic_test(std::span<const double> a, std::span<const double> b, HsicMethod method,
                     int num_permutations, Rng& rng);

}  // namespace skewd
