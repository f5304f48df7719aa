#pragma once

#include <cstdint>

#include "rankev/linalg.hpp"

namespace rankev {

/// Generative rank-r regression model y = xᵀ B θ + ε, ε ~ N(0, σ²), θ ~ N(0, τ² I_d).
struct RankRegressionSpec {
  int p = 0;
  int d = 0;
  int r = 0;
  Matrix b_star;      // p × d, numerical rank r
  Vector theta_star;  // length d, drawn once and frozen across sample sizes
  double sigma2 = 1.0;
  double tau2 = 1.0;

  /// Throws DimensionError / DomainError if the invariants do not hold.
  void validate() const;
};

struct RegressionDataset {
  int n = 0;
  Matrix x;  // n × p
  Matrix a;  // n × d, exactly x · b_star
  Vector y;  // length n
};

enum class InputCovariance { kIdentity };

struct DataGenConfig {
  InputCovariance input_covariance = InputCovariance::kIdentity;
  std::uint64_t seed = 0;
};

/// B* = U Vᵀ where U (p × r) and V (d × r) are standard normal draws with
/// orthonormalized columns, so all r nonzero singular values equal 1.
/// Regenerates from a perturbed stream if the product is not numerically rank r.
Matrix make_rank_r_factor(int p, int d, int r, std::uint64_t seed);

/// Builds a full spec: B* from make_rank_r_factor, θ* ~ N(0, τ² I_d), both
/// keyed by `seed`.
RankRegressionSpec make_rank_regression_spec(int p, int d, int r, double sigma2, double tau2,
                                             std::uint64_t seed);

/// Draws X (i.i.d. N(0,1)) and ε from streams keyed by (cfg.seed, tag, n);
/// datasets at different n are independent.
RegressionDataset sample_dataset(const RankRegressionSpec& spec, int n, const DataGenConfig& cfg);

/// B*ᵀ Σ_x B* (Σ_x = I_p).
Matrix population_gram(const RankRegressionSpec& spec);

}  // namespace rankev
