#include "rankev/rlct.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "rankev/errors.hpp"

namespace rankev {

AnalyticRlct analytic_rlct(int r) {
  if (r < 0) throw DomainError("analytic_rlct: rank must be >= 0, got " + std::to_string(r));
  return AnalyticRlct{0.5 * r, 1};
}

SlopeFit fit_log_n_slope(std::span<const LogNPoint> points) {
  std::set<int> distinct;
  for (const auto& pt : points) {
    if (pt.n < 2) throw DegenerateInputError("fit_log_n_slope: all n must be >= 2");
    distinct.insert(pt.n);
  }
  if (distinct.size() < 2) {
    throw DegenerateInputError("fit_log_n_slope: need at least 2 distinct sample sizes");
  }

  const auto k = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_v = 0.0;
  for (const auto& pt : points) {
    mean_x += std::log(static_cast<double>(pt.n));
    mean_v += pt.value;
  }
  mean_x /= k;
  mean_v /= k;

  double sxx = 0.0;
  double sxv = 0.0;
  double svv = 0.0;
  for (const auto& pt : points) {
    const double dx = std::log(static_cast<double>(pt.n)) - mean_x;
    const double dv = pt.value - mean_v;
    sxx += dx * dx;
    sxv += dx * dv;
    svv += dv * dv;
  }

  SlopeFit fit;
  fit.n_points = static_cast<int>(points.size());
  fit.slope = sxv / sxx;
  fit.intercept = mean_v - fit.slope * mean_x;

  double rss = 0.0;
  for (const auto& pt : points) {
    const double resid = pt.value - fit.intercept - fit.slope * std::log(static_cast<double>(pt.n));
    rss += resid * resid;
  }
  fit.r_squared = svv > 0.0 ? std::clamp(1.0 - rss / svv, 0.0, 1.0) : 1.0;
  fit.stderr_slope = fit.n_points > 2 ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
  return fit;
}

double estimate_rlct_from_slope(std::span<const LogNPoint> centered_points) {
  return -fit_log_n_slope(centered_points).slope;
}

double estimate_rlct_literal(std::span<const LogNPoint> evidence_points) {
  return -0.5 * fit_log_n_slope(evidence_points).slope;
}

PredictedBicSlope predicted_bic_error_slope(int d, int r) {
  if (r < 0 || r > d) {
    throw DomainError("predicted_bic_error_slope: need 0 <= r <= d, got d=" + std::to_string(d) +
                      ", r=" + std::to_string(r));
  }
  const double gap = 0.5 * (d - r);
  return PredictedBicSlope{gap, -gap};
}

}  // namespace rankev
