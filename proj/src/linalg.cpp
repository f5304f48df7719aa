#include "rankev/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rankev/errors.hpp"

namespace rankev {

double rank_tolerance(double largest_singular_value, Eigen::Index rows, Eigen::Index cols) {
  return largest_singular_value * static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

Eigen::Index count_above_tolerance(const Vector& singular_values, Eigen::Index rows,
                                   Eigen::Index cols) {
  if (singular_values.size() == 0) return 0;
  const double tol = rank_tolerance(singular_values.maxCoeff(), rows, cols);
  return (singular_values.array() > tol).count();
}

Eigen::Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return count_above_tolerance(svd.singularValues(), m.rows(), m.cols());
}

SpdFactor::SpdFactor(const Matrix& m, std::string_view context) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(context) + ": matrix is not square");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  llt_.compute(sym);
  if (llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << context << ": Cholesky factorization failed (dim " << sym.rows();
    if (sym.size() > 0) {
      msg << ", diagonal range [" << sym.diagonal().minCoeff() << ", "
          << sym.diagonal().maxCoeff() << "]";
    }
    msg << "); matrix is not numerically positive definite";
    throw NumericalError(msg.str());
  }
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(log_det_)) {
    throw NumericalError(std::string(context) + ": non-finite log-determinant");
  }
}

double SpdFactor::inverse_quadratic(const Vector& rhs) const {
  return llt_.matrixL().solve(rhs).squaredNorm();
}

double SpdFactor::inverse_quadratic_trace(const Matrix& rhs) const {
  return llt_.matrixL().solve(rhs).squaredNorm();
}

double log_normal_iid(const Vector& x, double variance) {
  const auto n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi * variance) + x.squaredNorm() / variance);
}

}  // namespace rankev
