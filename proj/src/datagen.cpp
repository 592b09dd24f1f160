#include "skewd/datagen.hpp"

#include <cmath>

#include "skewd/distributions.hpp"
#include "skewd/error.hpp"

namespace skewd {

namespace {

struct DatasetEntry {
  DatasetName name;
  const char* label;
};

constexpr DatasetEntry kDatasets[] = {
    {DatasetName::ANs_m455, "ANs_m455"}, {DatasetName::ANs_985, "ANs_985"},
    {DatasetName::ANs_1750, "ANs_1750"}, {DatasetName::LSs_m455, "LSs_m455"},
    {DatasetName::LSs_985, "LSs_985"},   {DatasetName::LSs_1750, "LSs_1750"},
    {DatasetName::AN, "AN"},             {DatasetName::ANs, "ANs"},
    {DatasetName::LS, "LS"},             {DatasetName::LSs, "LSs"},
};

double random_sign(Rng& rng) { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0; }

}  // namespace

void PairSpec::validate() const {
  if (n == 0) throw ConfigurationError("pair size must be positive");
  if (!std::isfinite(noise.shape)) throw ConfigurationError("noise shape must be finite");
}

double Sigmoid::operator()(double x) const {
  const double u = b * (x + c);
  return a * u / (1.0 + std::abs(u));
}

Sigmoid sample_sigmoid(Rng& rng, const SigmoidRanges& r) {
  Sigmoid s;
  s.a = random_sign(rng) * std::uniform_real_distribution<double>(r.a_lo, r.a_hi)(rng);
  s.b = random_sign(rng) * std::uniform_real_distribution<double>(r.b_lo, r.b_hi)(rng);
  s.c = std::uniform_real_distribution<double>(r.c_lo, r.c_hi)(rng);
  return s;
}

double MechanismParams::scale(double x) const { return g ? std::abs((*g)(x)) + g_floor : 1.0; }

LabeledPair generate_pair(const PairSpec& spec, const SigmoidRanges& ranges) {
  spec.validate();
  Rng rng(spec.seed);
  LabeledPair out;
  out.spec = spec;
  out.mechanism.sigma2 = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
  out.mechanism.f = sample_sigmoid(rng, ranges);
  if (spec.setting == Setting::LS || spec.setting == Setting::LSs) out.mechanism.g = sample_sigmoid(rng, ranges);

  std::normal_distribution<double> cause(0.0, std::sqrt(out.mechanism.sigma2));
  out.x.resize(spec.n);
  for (double& v : out.x) v = cause(rng);

  switch (spec.noise.kind) {
    case NoiseKind::skew_normal:
      out.noise = sn_sample({0.0, 1.0, spec.noise.shape}, spec.n, rng);
      break;
    case NoiseKind::gno:
      out.noise = gno_sample({0.0, 1.0, spec.noise.shape}, spec.n, rng);
      break;
    case NoiseKind::gaussian: {
      std::normal_distribution<double> eps(0.0, 1.0);
      out.noise.resize(spec.n);
      for (double& v : out.noise) v = eps(rng);
      break;
    }
  }

  out.y.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.y[i] = out.mechanism.f(out.x[i]) + out.mechanism.scale(out.x[i]) * out.noise[i];
  }
  return out;
}

DatasetName parse_dataset_name(const std::string& name) {
  for (const auto& d : kDatasets) {
    if (name == d.label) return d.name;
  }
  throw ConfigurationError("unknown dataset '" + name + "'");
}

std::string to_string(DatasetName name) {
  for (const auto& d : kDatasets) {
    if (d.name == name) return d.label;
  }
  return "unknown";
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::AN: return "AN";
    case Setting::ANs: return "ANs";
    case Setting::LS: return "LS";
    case Setting::LSs: return "LSs";
  }
  return "unknown";
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::skew_normal: return "skew_normal";
    case NoiseKind::gno: return "gno";
    case NoiseKind::gaussian: return "gaussian";
  }
  return "unknown";
}

Setting dataset_setting(DatasetName name) {
  switch (name) {
    case DatasetName::ANs_m455:
    case DatasetName::ANs_985:
    case DatasetName::ANs_1750:
    case DatasetName::ANs:
      return Setting::ANs;
    case DatasetName::LSs_m455:
    case DatasetName::LSs_985:
    case DatasetName::LSs_1750:
    case DatasetName::LSs:
      return Setting::LSs;
    case DatasetName::AN:
      return Setting::AN;
    case DatasetName::LS:
      return Setting::LS;
  }
  return Setting::AN;
}

NoiseSpec dataset_noise(DatasetName name, std::size_t index) {
  const bool first = index % 2 == 0;
  switch (name) {
    case DatasetName::ANs_m455:
    case DatasetName::LSs_m455:
      return first ? NoiseSpec{NoiseKind::skew_normal, -2.0} : NoiseSpec{NoiseKind::gno, 0.15};
    case DatasetName::ANs_985:
    case DatasetName::LSs_985:
      return first ? NoiseSpec{NoiseKind::skew_normal, 20.0} : NoiseSpec{NoiseKind::gno, -0.31};
    case DatasetName::ANs_1750:
    case DatasetName::LSs_1750:
      return {NoiseKind::gno, -0.5};
    default:
      return {NoiseKind::gaussian, 0.0};
  }
}

std::vector<LabeledPair> generate_dataset(DatasetName name, std::size_t pairs, std::size_t n,
                                          std::uint64_t master_seed) {
  if (pairs == 0) throw ConfigurationError("dataset needs at least one pair");
  std::vector<LabeledPair> out;
  out.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    PairSpec spec{dataset_setting(name), dataset_noise(name, i), n, derive_seed(master_seed, i)};
    out.push_back(generate_pair(spec));
  }
  return out;
}

}  // namespace skewd
