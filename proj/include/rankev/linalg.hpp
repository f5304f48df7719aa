#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace rankev {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular value s counts as nonzero iff s > s_max · max(rows, cols) · ε.
double rank_tolerance(double largest_singular_value, Eigen::Index rows, Eigen::Index cols);

/// Numerical rank of `m` under the rank_tolerance rule (SVD based).
Eigen::Index numerical_rank(const Matrix& m);

/// Number of entries of a descending singular-value vector above the threshold.
Eigen::Index count_above_tolerance(const Vector& singular_values, Eigen::Index rows,
                                   Eigen::Index cols);

/// Cholesky factor of a symmetric positive-definite matrix. The input is
/// symmetrized as (M + Mᵀ)/2 first; no jitter is ever added. Failure throws
/// NumericalError naming `context`, the dimension, and the diagonal range.
class SpdFactor {
 public:
  SpdFactor(const Matrix& m, std::string_view context);

  Eigen::Index dim() const { return llt_.rows(); }
  double log_det() const { return log_det_; }
  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }
  /// ‖L⁻¹ b‖², i.e. bᵀ M⁻¹ b, via one triangular solve.
  double inverse_quadratic(const Vector& rhs) const;
  /// Σ_i ‖L⁻¹ B_i‖² over the columns of `rhs` = tr(Bᵀ M⁻¹ B).
  double inverse_quadratic_trace(const Matrix& rhs) const;

 private:
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
};

/// log N(x; 0, variance) summed over entries.
double log_normal_iid(const Vector& x, double variance);

}  // namespace rankev
