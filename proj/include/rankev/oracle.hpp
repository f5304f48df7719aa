#pragma once

#include <cstdint>

#include "rankev/evidence.hpp"

namespace rankev {

struct QuadratureSettings {
  double rel_tol = 1e-9;
  unsigned max_subdivisions = 15;    // maximum bisection depth per axis
  double integration_radius = 12.0;  // half-width in posterior standard deviations

  void validate() const;
};

/// log ∫ p(y | θ) π(θ) dθ by adaptive Gauss–Kronrod quadrature (nested for
/// d = 2), in log space with the integrand scaled by its value at the mode.
/// The box is centered on the posterior mean; for d = 2 the inner axis follows
/// the conditional mean. Throws OracleError if the error estimate misses rel_tol.
double quadrature_log_evidence(const GaussianLinearProblem& prob,
                               const QuadratureSettings& settings = {});

struct ImportanceEstimate {
  double estimate = 0.0;
  double stderr_log = 0.0;           // delta-method standard error of the log estimate
  double log_weight_variance = 0.0;  // sample variance of the log-weights
};

/// Importance sampling with proposal N(μ, scale² Λ⁻¹) built from the exact
/// posterior. With scale = 1 every weight equals Z.
ImportanceEstimate importance_log_evidence(const GaussianLinearProblem& prob, int n_samples,
                                           std::uint64_t seed, double proposal_scale = 1.0);

/// Log joint density log p(y | θ) + log π(θ).
double log_joint(const GaussianLinearProblem& prob, const Vector& theta);

/// Random problem with 1 <= d <= max_d and 1 <= n <= max_n. Designs are
/// rank-deficient about a third of the time; σ² and τ² are log-uniform on
/// [0.1, 10].
GaussianLinearProblem random_test_problem(std::uint64_t seed, int max_d, int max_n);

struct VerificationReport {
  int quadrature_problems = 0;
  double max_quadrature_abs_diff = 0.0;
  int quadrature_failures = 0;  // oracle did not converge
  int laplace_problems = 0;
  double max_laplace_rel_diff = 0.0;
  int importance_problems = 0;
  double max_importance_z = 0.0;  // |estimate − exact| / stderr, widened proposal
  double max_importance_conjugate_stderr = 0.0;

  static constexpr double kQuadratureTol = 1e-6;
  static constexpr double kLaplaceRelTol = 1e-8;
  static constexpr double kImportanceZ = 3.0;
  static constexpr double kConjugateStderr = 1e-10;

  bool passed() const;
};

/// Closed form against quadrature (d <= 2, n <= 50), against the exact Laplace
/// expansion (d <= 20, n <= 1000), and against importance sampling (d <= 5).
VerificationReport run_verification_suite(int quadrature_problems = 100,
                                          int laplace_problems = 200,
                                          int importance_problems = 20, std::uint64_t seed = 0);

}  // namespace rankev
