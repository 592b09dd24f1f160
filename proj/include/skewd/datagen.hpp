#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewd/inference.hpp"
#include "skewd/random.hpp"

namespace skewd {

enum class Setting { AN, ANs, LS, LSs };
enum class NoiseKind { skew_normal, gno, gaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  /// lambda for skew_normal, k for gno, unused for gaussian.
  double shape = 0.0;
};

struct PairSpec {
  Setting setting = Setting::AN;
  NoiseSpec noise{};
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  /// Throws ConfigurationError for n == 0 or a non-finite shape.
  void validate() const;
};

struct SigmoidRanges {
  double a_lo = 0.5, a_hi = 2.0;
  double b_lo = 0.5, b_hi = 2.0;
  double c_lo = -2.0, c_hi = 2.0;
};

/// s(x) = a b (x + c) / (1 + |b (x + c)|): strictly monotone, |s| < |a|.
struct Sigmoid {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double operator()(double x) const;
};

/// |a| ~ U(a_lo, a_hi) with a random sign, |b| ~ U(b_lo, b_hi) with a random
/// sign, c ~ U(c_lo, c_hi).
Sigmoid sample_sigmoid(Rng& rng, const SigmoidRanges& ranges = {});

struct MechanismParams {
  double sigma2 = 1.0;
  Sigmoid f{};
  /// Present for the location-scale settings.
  std::optional<Sigmoid> g;
  double g_floor = 0.1;
  /// g_+(x) = |g(x)| + floor, or 1 for additive settings.
  double scale(double x) const;
};

struct LabeledPair {
  std::vector<double> x;
  std::vector<double> y;
  Direction true_direction = Direction::XtoY;
  PairSpec spec{};
  MechanismParams mechanism{};
  /// The drawn noise, so that (y - f(x)) / g_+(x) can be checked.
  std::vector<double> noise;
};

/// X ~ N(0, s2) with s2 ~ U[1, 2]; y = f(x) + eps or f(x) + g_+(x) eps.
LabeledPair generate_pair(const PairSpec& spec, const SigmoidRanges& ranges = {});

enum class DatasetName { ANs_m455, ANs_985, ANs_1750, LSs_m455, LSs_985, LSs_1750, AN, ANs, LS, LSs };

/// Throws ConfigurationError for unknown names.
DatasetName parse_dataset_name(const std::string& name);
std::string to_string(DatasetName name);
std::string to_string(Setting s);
std::string to_string(NoiseKind k);

/// Noise law of pair `index` of a dataset: mixed classes alternate between
/// their skew-normal and GNO constituents starting with skew-normal.
NoiseSpec dataset_noise(DatasetName name, std::size_t index);
Setting dataset_setting(DatasetName name);

/// `pairs` pairs of size n with per-pair seeds derived from master_seed.
std::vector<LabeledPair> generate_dataset(DatasetName name, std::size_t pairs, std::size_t n,
                                          std::uint64_t master_seed);

}  // namespace skewd
