#include "skewd/inference.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "skewd/ecm.hpp"
#include "skewd/error.hpp"

namespace skewd {

namespace {

constexpr std::size_t kMinObservations = 50;

// Stream indices under the per-pair seed.
constexpr std::uint64_t kFitStream = 0;
constexpr std::uint64_t kHsicStream = 1;

Decision pick(double xy, double yx, Rule rule) {
  Decision d;
  d.rule = rule;
  d.evidence_xy = xy;
  d.evidence_yx = yx;
  d.confidence = std::abs(xy - yx);
  d.tie = xy == yx;
  d.inferred = yx > xy ? Direction::YtoX : Direction::XtoY;
  if (d.tie) d.confidence = 0.0;
  return d;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::XtoY ? "x->y" : "y->x"; }

std::string to_string(Rule r) { return r == Rule::likelihood ? "likelihood" : "independence"; }

std::string to_string(Profile p) { return p == Profile::paper ? "paper" : "fast"; }

Profile parse_profile(const std::string& name) {
  if (name == "paper") return Profile::paper;
  if (name == "fast") return Profile::fast;
  throw ConfigurationError("unknown profile '" + name + "'");
}

Standardized standardize(std::span<const double> v) {
  if (v.size() < 2) throw DegenerateInputError("standardization needs at least two values");
  const Eigen::Map<const Eigen::VectorXd> m(v.data(), static_cast<Eigen::Index>(v.size()));
  Standardized out;
  out.mean = m.mean();
  const Eigen::ArrayXd centered = m.array() - out.mean;
  out.sd = std::sqrt(centered.square().sum() / static_cast<double>(v.size() - 1));
  if (!(out.sd > 0.0) || !std::isfinite(out.sd)) throw DegenerateInputError("constant input cannot be standardized");
  out.values = (centered / out.sd).matrix();
  return out;
}

double gaussian_marginal_loglik(const Eigen::VectorXd& standardized) {
  const double n = static_cast<double>(standardized.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * standardized.squaredNorm();
}

InferenceConfig InferenceConfig::paper() {
  InferenceConfig c;
  c.profile = Profile::paper;
  return c;
}

InferenceConfig InferenceConfig::fast() {
  InferenceConfig c;
  c.profile = Profile::fast;
  c.fit.heuristic.population = 30;
  c.fit.heuristic.max_iters = 500;
  c.fit.cv_heuristic.population = 30;
  c.fit.cv_heuristic.max_iters = 150;
  c.fit.bayes_opt.folds = 4;
  c.fit.bayes_opt.lhs_candidates = 12;
  c.fit.bayes_opt.ei_candidates = 6;
  c.fit.ecm.max_iters = 500;
  return c;
}

InferenceConfig InferenceConfig::for_profile(Profile p) {
  return p == Profile::paper ? paper() : fast();
}

DirectionFit fit_direction(std::span<const double> cause, std::span<const double> effect,
                           Direction direction, const FitConfig& config, Rng& rng) {
  if (cause.size() != effect.size()) throw DimensionError("cause and effect differ in length");
  if (cause.size() < kMinObservations) throw DimensionError("at least 50 observations are required");
  DirectionFit out;
  out.direction = direction;
  out.cause = standardize(cause).values;
  out.effect = standardize(effect).values;
  const std::span<const double> c(out.cause.data(), cause.size());
  const std::span<const double> e(out.effect.data(), effect.size());

  const PenaltySelection selection = bayes_opt_penalties(c, e, config, rng);

  const DirectionBasis basis = build_direction_basis(c, config.q, config.p);
  const DesignPair design = basis.design(c);
  const PenaltySpec pen = penalty_matrices(config.q, config.p);

  std::vector<ModelParams> starts = selection.warm_starts;
  const ModelParams ls_start = initial_theta(design, out.effect, pen, selection.penalties.alpha);
  if (starts.empty()) starts.push_back(ls_start);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (int s = 0; s < config.extra_random_starts; ++s) {
    ModelParams t = ls_start;
    for (Eigen::Index j = 0; j < t.psi.size(); ++j) t.psi[j] += jitter(rng);
    for (Eigen::Index j = 0; j < t.rho.size(); ++j) t.rho[j] += jitter(rng);
    t.lambda += 5.0 * jitter(rng);
    starts.push_back(t.clamped());
  }

  const HeuristicFit heuristic =
      heuristic_fit(out.effect, design, selection.penalties, pen, starts, config.heuristic, rng);
  out.heuristic = summarize_fit(heuristic.theta, out.effect, design, selection.penalties, pen);

  EcmOutcome ecm = ecm_fit(heuristic.theta, out.effect, design, selection.penalties, pen, config.ecm, rng);
  out.fit = std::move(ecm.fit);
  out.conditional_loglik = out.fit.loglik;
  return out;
}

Decision decide_likelihood(const DirectionFit& fx, const DirectionFit& fy, bool include_marginals) {
  double xy = fx.conditional_loglik;
  double yx = fy.conditional_loglik;
  if (include_marginals) {
    xy += gaussian_marginal_loglik(fx.cause);
    yx += gaussian_marginal_loglik(fy.cause);
  }
  return pick(xy, yx, Rule::likelihood);
}

double residual_pvalue(const DirectionFit& fit, const HsicConfig& config, Rng& rng,
                       EstimateSource source) {
  const Eigen::VectorXd& r = source == EstimateSource::ecm ? fit.fit.residuals : fit.heuristic.residuals;
  if (r.size() != fit.cause.size() || r.size() == 0) throw DimensionError("fit carries no residuals");
  const HsicResult h = hsic_test({fit.cause.data(), static_cast<std::size_t>(fit.cause.size())},
                                 {r.data(), static_cast<std::size_t>(r.size())}, config.method,
                                 config.num_permutations, rng);
  return h.p_value;
}

Decision decide_independence(const DirectionFit& fx, const DirectionFit& fy,
                             const HsicConfig& config, std::uint64_t seed, EstimateSource source) {
  auto pvalue = [&](const DirectionFit& f) {
    if (source == EstimateSource::ecm && f.residual_pvalue) return *f.residual_pvalue;
    Rng rng = make_rng(seed, kHsicStream);
    return residual_pvalue(f, config, rng, source);
  };
  return pick(pvalue(fx), pvalue(fy), Rule::independence);
}

PairInference infer_pair(std::span<const double> x, std::span<const double> y,
                         const InferenceConfig& config, std::uint64_t seed, RuleSelection rules) {
  PairInference out;
  {
    Rng rng = make_rng(seed, kFitStream);
    out.xy = fit_direction(x, y, Direction::XtoY, config.fit, rng);
  }
  {
    Rng rng = make_rng(seed, kFitStream);
    out.yx = fit_direction(y, x, Direction::YtoX, config.fit, rng);
  }
  if (rules.likelihood) out.likelihood = decide_likelihood(out.xy, out.yx, config.include_marginals);
  if (rules.independence) {
    for (DirectionFit* f : {&out.xy, &out.yx}) {
      Rng rng = make_rng(seed, kHsicStream);
      f->residual_pvalue = residual_pvalue(*f, config.hsic, rng);
    }
    out.independence = decide_independence(out.xy, out.yx, config.hsic, seed);
  }
  return out;
}

}  // namespace skewd
