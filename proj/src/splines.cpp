#include "skewd/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skewd/error.hpp"

namespace skewd {

SplineBasis::SplineBasis(double lo, double hi, int num_basis)
    : lo_(lo), hi_(hi), num_basis_(num_basis) {
  if (num_basis < 4) throw ConfigurationError("a cubic basis needs at least 4 functions");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DegenerateInputError("spline domain must be a finite interval with hi > lo");
  }
  const int segments = num_basis - kDegree;
  const double h = (hi - lo) / segments;
  knots_.resize(num_basis + kDegree + 1);
  for (int j = 0; j < static_cast<int>(knots_.size()); ++j) knots_[j] = lo + (j - kDegree) * h;
  knots_[kDegree] = lo;
  knots_[num_basis] = hi;
}

Eigen::RowVectorXd SplineBasis::cox_de_boor(double x, int degree) const {
  const int m = static_cast<int>(knots_.size());
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(m - 1);
  for (int j = 0; j < m - 1; ++j) {
    if (knots_[j] <= x && x < knots_[j + 1]) {
      b[j] = 1.0;
      break;
    }
  }
  for (int d = 1; d <= degree; ++d) {
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(m - 1 - d);
    for (int j = 0; j < m - 1 - d; ++j) {
      const double left = (x - knots_[j]) / (knots_[j + d] - knots_[j]);
      const double right = (knots_[j + d + 1] - x) / (knots_[j + d + 1] - knots_[j + 1]);
      next[j] = left * b[j] + right * b[j + 1];
    }
    b = std::move(next);
  }
  return b;
}

Eigen::RowVectorXd SplineBasis::derivative(double x) const {
  const Eigen::RowVectorXd b2 = cox_de_boor(x, kDegree - 1);
  Eigen::RowVectorXd d(num_basis_);
  for (int j = 0; j < num_basis_; ++j) {
    d[j] = kDegree * (b2[j] / (knots_[j + 3] - knots_[j]) -
                      b2[j + 1] / (knots_[j + 4] - knots_[j + 1]));
  }
  return d;
}

Eigen::RowVectorXd SplineBasis::evaluate(double x) const {
  if (x < lo_) return cox_de_boor(lo_, kDegree) + derivative(lo_) * (x - lo_);
  if (x > hi_) return cox_de_boor(hi_, kDegree) + derivative(hi_) * (x - hi_);
  return cox_de_boor(x, kDegree);
}

Eigen::MatrixXd SplineBasis::evaluate(std::span<const double> xs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), num_basis_);
  for (std::size_t i = 0; i < xs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = evaluate(xs[i]);
  return out;
}

void DesignPair::validate() const {
  if (location.rows() != scale.rows()) {
    throw DimensionError("location and scale design matrices differ in row count");
  }
  if (!location.allFinite() || !scale.allFinite()) {
    throw DimensionError("design matrices contain non-finite entries");
  }
}

std::pair<SplineBasis, Eigen::MatrixXd> build_basis(std::span<const double> x, int num_basis) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  if (distinct < num_basis) {
    throw DegenerateInputError("need at least " + std::to_string(num_basis) +
                               " distinct points, got " + std::to_string(distinct));
  }
  SplineBasis basis(sorted.front(), sorted[distinct - 1], num_basis);
  Eigen::MatrixXd m = basis.evaluate(x);
  return {std::move(basis), std::move(m)};
}

DesignPair DirectionBasis::design(std::span<const double> cause) const {
  return {location.evaluate(cause), scale.evaluate(cause)};
}

DirectionBasis build_direction_basis(std::span<const double> cause, int q, int p) {
  auto [loc, n_mat] = build_basis(cause, q);
  auto [sc, z_mat] = build_basis(cause, p);
  return {std::move(loc), std::move(sc)};
}

Eigen::MatrixXd difference_matrix(int r) {
  if (r < 3) throw DimensionError("difference matrix needs r >= 3");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(r - 2, r);
  for (int j = 0; j < r - 2; ++j) {
    d(j, j) = 1.0;
    d(j, j + 1) = -2.0;
    d(j, j + 2) = 1.0;
  }
  return d;
}

PenaltySpec penalty_matrices(int q, int p) {
  const Eigen::MatrixXd dq = difference_matrix(q);
  const Eigen::MatrixXd dp = difference_matrix(p);
  return {dq.transpose() * dq, dp.transpose() * dp};
}

}  // namespace skewd
