#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace skewd {

/// Cubic B-spline basis on equidistant knots (P-spline layout).
///
/// The domain [lo, hi] is split into num_basis - 3 equal segments and the
/// knot vector is extended by three segments on each side, so the basis forms
/// a partition of unity on the whole domain. Points outside the domain are
/// evaluated by linear extrapolation of every basis function from the nearest
/// boundary, which keeps the partition of unity and makes fitted curves
/// continue linearly.
class SplineBasis {
 public:
  static constexpr int kDegree = 3;

  SplineBasis(double lo, double hi, int num_basis);

  int num_basis() const { return num_basis_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Row vector of all basis values at x.
  Eigen::RowVectorXd evaluate(double x) const;
  /// n x num_basis evaluation matrix.
  Eigen::MatrixXd evaluate(std::span<const double> xs) const;

 private:
  // Values of all degree-`degree` B-splines on knots_ at an in-domain x.
  Eigen::RowVectorXd cox_de_boor(double x, int degree) const;
  Eigen::RowVectorXd derivative(double x) const;

  double lo_;
  double hi_;
  int num_basis_;
  std::vector<double> knots_;
};

/// Location (N, n x q) and scale (Z, n x p) design matrices for one direction.
struct DesignPair {
  Eigen::MatrixXd location;
  Eigen::MatrixXd scale;

  Eigen::Index rows() const { return location.rows(); }
  /// Throws DimensionError on row mismatch or non-finite entries.
  void validate() const;
};

/// Second-order difference penalties K = D_q^T D_q and M = D_p^T D_p.
struct PenaltySpec {
  Eigen::MatrixXd location;  // K
  Eigen::MatrixXd scale;     // M
};

/// Builds a basis spanning [min(x), max(x)] and evaluates it at x.
/// Throws DegenerateInputError when x has fewer than num_basis distinct values.
std::pair<SplineBasis, Eigen::MatrixXd> build_basis(std::span<const double> x, int num_basis);

/// Both bases are built from the same cause values.
struct DirectionBasis {
  SplineBasis location;
  SplineBasis scale;

  DesignPair design(std::span<const double> cause) const;
};

DirectionBasis build_direction_basis(std::span<const double> cause, int q, int p);

/// (r-2) x r matrix with rows (..., 1, -2, 1, ...). Throws DimensionError for r < 3.
Eigen::MatrixXd difference_matrix(int r);

PenaltySpec penalty_matrices(int q, int p);

}  // namespace skewd
