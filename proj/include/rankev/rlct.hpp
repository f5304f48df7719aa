#pragma once

#include <span>
#include <vector>

namespace rankev {

struct AnalyticRlct {
  double lambda = 0.0;
  int multiplicity = 1;
};

/// λ(r) = r/2 with multiplicity 1 for rank-r linear–Gaussian regression.
AnalyticRlct analytic_rlct(int r);

struct LogNPoint {
  int n = 0;
  double value = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;  // 0 when there are no residual degrees of freedom
  int n_points = 0;
  double r_squared = 1.0;
};

/// OLS of value on log n with the classical homoskedastic slope standard error.
/// Requires at least two distinct n, all n >= 2.
SlopeFit fit_log_n_slope(std::span<const LogNPoint> points);

/// λ̂ = −slope of the centered evidence (log Z_n − log p(D_n | θ̂_n)) against log n.
/// Points carry the centered values.
double estimate_rlct_from_slope(std::span<const LogNPoint> centered_points);

/// The −½·slope(log Z_n vs log n) form applied to uncentered evidences.
/// Kept for comparison; it does not converge to λ because log Z_n carries an
/// O(n) fit term.
double estimate_rlct_literal(std::span<const LogNPoint> evidence_points);

struct PredictedBicSlope {
  double prop3_slope = 0.0;   // slope of log Z^Lap − log Z: +(d − r)/2
  double table1_slope = 0.0;  // sign convention of the rank-sweep tables: −(d − r)/2
};

PredictedBicSlope predicted_bic_error_slope(int d, int r);

}  // namespace rankev
