#include "skewd/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "skewd/distributions.hpp"
#include "skewd/error.hpp"

namespace skewd {

Eigen::MatrixXd latin_hypercube(int n, int dims, std::span<const std::pair<double, double>> ranges,
                                Rng& rng) {
  if (n < 1) throw ConfigurationError("latin hypercube needs n >= 1");
  if (static_cast<int>(ranges.size()) != dims) throw DimensionError("one range per dimension required");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd out(n, dims);
  std::vector<int> strata(n);
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const auto [lo, hi] = ranges[d];
    const double width = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      // clamp keeps u * width + offset strictly inside its stratum
      const double u = std::min(unit(rng), std::nextafter(1.0, 0.0));
      out(i, d) = lo + (strata[i] + u) * width;
    }
  }
  return out;
}

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double r = std::sqrt(5.0) * (a - b).norm() / length_scale_;
  return signal_var_ * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

void GaussianProcess::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size() || y.size() == 0) throw DimensionError("GP inputs and targets differ in length");
  x_ = x;
  const auto n = y.size();
  y_mean_ = y.mean();
  const double sd = n > 1 ? std::sqrt((y.array() - y_mean_).square().sum() / static_cast<double>(n - 1)) : 0.0;
  y_scale_ = sd > 0.0 ? sd : 1.0;
  const Eigen::VectorXd t = (y.array() - y_mean_) / y_scale_;

  constexpr double kLengths[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  constexpr double kSignals[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  double best = -std::numeric_limits<double>::infinity();
  double best_len = 1.0;
  double best_sig = 1.0;
  for (double len : kLengths) {
    for (double sig : kSignals) {
      length_scale_ = len;
      signal_var_ = sig;
      Eigen::MatrixXd k(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_.row(i), x_.row(j));
      }
      k.diagonal().array() += kJitter;
      Eigen::LLT<Eigen::MatrixXd> llt(k);
      if (llt.info() != Eigen::Success) continue;
      const Eigen::VectorXd a = llt.solve(t);
      const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      const double lml = -0.5 * t.dot(a) - 0.5 * logdet;
      if (lml > best) {
        best = lml;
        best_len = len;
        best_sig = sig;
      }
    }
  }
  length_scale_ = best_len;
  signal_var_ = best_sig;
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_.row(i), x_.row(j));
  }
  k.diagonal().array() += kJitter;
  chol_.compute(k);
  alpha_ = chol_.solve(t);
}

std::pair<double, double> GaussianProcess::predict(const Eigen::VectorXd& x) const {
  const auto n = x_.rows();
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks[i] = kernel(x, x_.row(i));
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(signal_var_ - v.squaredNorm(), 0.0);
  return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
}

double expected_improvement(double mean, double sd, double best) {
  const double gain = mean - best;
  if (!(sd > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sd;
  return gain * normal_cdf(z) + sd * normal_pdf(z);
}

BayesOptOutcome bayes_opt_maximize(const std::function<double(std::size_t, double, double)>& score,
                                   const BayesOptConfig& config, Rng& rng) {
  if (config.lhs_candidates < 1) throw ConfigurationError("Bayesian optimization needs an initial candidate");
  if (config.ei_candidates < 0 || !(config.log_hi > config.log_lo)) {
    throw ConfigurationError("invalid Bayesian optimization box or budget");
  }
  const std::pair<double, double> box[] = {{config.log_lo, config.log_hi}, {config.log_lo, config.log_hi}};
  BayesOptOutcome out;
  const Eigen::MatrixXd design = latin_hypercube(config.lhs_candidates, 2, box, rng);
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double a = design(i, 0);
    const double k = design(i, 1);
    out.trials.push_back({a, k, score(out.trials.size(), a, k)});
  }

  auto refresh_best = [&] {
    out.best_index = 0;
    for (std::size_t i = 1; i < out.trials.size(); ++i) {
      if (out.trials[i].score > out.trials[out.best_index].score) out.best_index = i;
    }
  };
  refresh_best();

  std::uniform_real_distribution<double> coord(config.log_lo, config.log_hi);
  for (int step = 0; step < config.ei_candidates; ++step) {
    std::vector<double> finite;
    for (const auto& t : out.trials) {
      if (std::isfinite(t.score)) finite.push_back(t.score);
    }
    if (finite.empty()) break;
    const auto [lo_it, hi_it] = std::minmax_element(finite.begin(), finite.end());
    if (*hi_it - *lo_it <= 0.0) break;  // flat surface: nothing to model
    const double floor = *lo_it - (*hi_it - *lo_it);

    Eigen::MatrixXd x(out.trials.size(), 2);
    Eigen::VectorXd y(out.trials.size());
    for (std::size_t i = 0; i < out.trials.size(); ++i) {
      x(i, 0) = out.trials[i].log_alpha;
      x(i, 1) = out.trials[i].log_kappa;
      y[i] = std::isfinite(out.trials[i].score) ? out.trials[i].score : floor;
    }
    GaussianProcess gp;
    gp.fit(x, y);
    const double best = *hi_it;

    Eigen::Vector2d pick(coord(rng), coord(rng));
    double best_ei = -1.0;
    for (int c = 0; c < config.acquisition_pool; ++c) {
      const Eigen::Vector2d cand(coord(rng), coord(rng));
      const auto [m, s] = gp.predict(cand);
      const double ei = expected_improvement(m, s, best);
      if (ei > best_ei) {
        best_ei = ei;
        pick = cand;
      }
    }
    out.trials.push_back({pick[0], pick[1], score(out.trials.size(), pick[0], pick[1])});
    refresh_best();
  }
  return out;
}

ModelParams initial_theta(const DesignPair& design, const Eigen::VectorXd& y, const PenaltySpec& pen,
                          double alpha) {
  const Eigen::MatrixXd& n_mat = design.location;
  Eigen::MatrixXd system = n_mat.transpose() * n_mat + alpha * pen.location;
  system.diagonal().array() += 1e-10 * system.trace() / static_cast<double>(system.rows());
  const Eigen::VectorXd psi = system.llt().solve(n_mat.transpose() * y);
  const double var = std::max((y - n_mat * psi).squaredNorm() / static_cast<double>(y.size()), 1e-8);
  ModelParams theta{psi, Eigen::VectorXd::Constant(design.scale.cols(), std::log(var)), 0.0};
  return theta.clamped();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> theta_bounds(int q, int p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd lo(q + p + 1);
  Eigen::VectorXd hi(q + p + 1);
  lo << Eigen::VectorXd::Constant(q, -inf), Eigen::VectorXd::Constant(p, kRhoLower), -kLambdaBound;
  hi << Eigen::VectorXd::Constant(q, inf), Eigen::VectorXd::Constant(p, kRhoUpper), kLambdaBound;
  return {lo, hi};
}

namespace {

// Penalized log-likelihood on a packed (psi, rho, lambda) vector, without
// unpacking copies.
class PackedObjective {
 public:
  PackedObjective(const Eigen::VectorXd& y, const DesignPair& design, const PenaltyParams& penalties,
                  const PenaltySpec& pen)
      : y_(y), design_(design), penalties_(penalties), pen_(pen),
        q_(design.location.cols()), p_(design.scale.cols()) {}

  double operator()(const Eigen::VectorXd& v) const {
    const auto psi = v.head(q_);
    const auto rho = v.segment(q_, p_);
    const double lam = v[q_ + p_];
    const Eigen::VectorXd e = y_ - design_.location * psi;
    const Eigen::VectorXd eta = design_.scale * rho;
    double sum = 0.5 * static_cast<double>(y_.size()) * std::log(2.0 / std::numbers::pi) - 0.5 * eta.sum();
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      const double z = e[i] * std::exp(-0.5 * eta[i]);
      sum += -0.5 * z * z + normal_logcdf(lam * z);
    }
    return sum - 0.5 * penalties_.alpha * psi.dot(pen_.location * psi) -
           0.5 * penalties_.kappa * rho.dot(pen_.scale * rho);
  }

 private:
  const Eigen::VectorXd& y_;
  const DesignPair& design_;
  PenaltyParams penalties_;
  const PenaltySpec& pen_;
  Eigen::Index q_;
  Eigen::Index p_;
};

}  // namespace

HeuristicFit heuristic_fit(const Eigen::VectorXd& y, const DesignPair& design,
                           const PenaltyParams& penalties, const PenaltySpec& pen,
                           const std::vector<ModelParams>& starts, const CmaConfig& config, Rng& rng) {
  if (starts.empty()) throw InputError("heuristic fit needs at least one starting point");
  const auto q = static_cast<int>(design.location.cols());
  const auto p = static_cast<int>(design.scale.cols());
  CmaConfig cfg = config;
  if (cfg.lower.size() == 0) std::tie(cfg.lower, cfg.upper) = theta_bounds(q, p);
  const PackedObjective objective(y, design, penalties, pen);

  HeuristicFit best{starts.front(), -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t s = 0; s < starts.size(); ++s) {
    check_dimensions(starts[s], design, y.size());
    const Eigen::VectorXd x0 = starts[s].clamped().pack();
    if (!std::isfinite(objective(x0))) continue;
    const CmaResult r = cma_es_maximize(objective, x0, cfg, rng);
    if (r.f_best > best.penalized_loglik) {
      best = {ModelParams::unpack(r.x_best, q, p), r.f_best, s};
    }
  }
  if (!std::isfinite(best.penalized_loglik)) throw InputError("no starting point has a finite likelihood");
  return best;
}

CvResult cv_heldout_loglik(std::span<const double> x, std::span<const double> y,
                           const PenaltyParams& penalties, int folds, const FitConfig& config,
                           Rng& rng) {
  if (x.size() != y.size()) throw DimensionError("cause and effect differ in length");
  if (folds < 2) throw ConfigurationError("cross-validation needs at least 2 folds");
  const std::size_t n = x.size();
  if (n < 2 * static_cast<std::size_t>(folds)) {
    throw ConfigurationError("too few observations for " + std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const PenaltySpec pen = penalty_matrices(config.q, config.p);
  CvResult out{0.0, {}};
  for (int f = 0; f < folds; ++f) {
    std::vector<double> train_x, train_y, test_x;
    std::vector<double> test_y;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = order[i];
      if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) {
        test_x.push_back(x[idx]);
        test_y.push_back(y[idx]);
      } else {
        train_x.push_back(x[idx]);
        train_y.push_back(y[idx]);
      }
    }
    const DirectionBasis basis = build_direction_basis(train_x, config.q, config.p);
    const DesignPair train_design = basis.design(train_x);
    const Eigen::VectorXd ty = Eigen::Map<const Eigen::VectorXd>(train_y.data(), static_cast<Eigen::Index>(train_y.size()));
    const ModelParams start = initial_theta(train_design, ty, pen, penalties.alpha);
    const HeuristicFit fit = heuristic_fit(ty, train_design, penalties, pen, {start}, config.cv_heuristic, rng);

    const DesignPair test_design = basis.design(test_x);
    const Eigen::VectorXd hy = Eigen::Map<const Eigen::VectorXd>(test_y.data(), static_cast<Eigen::Index>(test_y.size()));
    out.score += observed_loglik(fit.theta, hy, test_design) / static_cast<double>(test_y.size());
    out.fold_thetas.push_back(fit.theta);
  }
  out.score /= folds;
  return out;
}

PenaltySelection bayes_opt_penalties(std::span<const double> x, std::span<const double> y,
                                     const FitConfig& config, Rng& rng) {
  // One fold split and one set of CMA-ES streams shared by every candidate.
  const std::uint64_t cv_seed = rng();
  std::vector<std::vector<ModelParams>> fold_thetas;
  auto score = [&](std::size_t, double log_alpha, double log_kappa) {
    Rng cv_rng(cv_seed);
    const PenaltyParams pp{std::exp(log_alpha), std::exp(log_kappa)};
    CvResult r = cv_heldout_loglik(x, y, pp, config.bayes_opt.folds, config, cv_rng);
    fold_thetas.push_back(std::move(r.fold_thetas));
    return r.score;
  };
  PenaltySelection out;
  out.history = bayes_opt_maximize(score, config.bayes_opt, rng);
  const auto& best = out.history.trials[out.history.best_index];
  out.penalties = {std::exp(best.log_alpha), std::exp(best.log_kappa)};
  out.warm_starts = std::move(fold_thetas[out.history.best_index]);
  return out;
}

}  // namespace skewd
