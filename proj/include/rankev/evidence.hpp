#pragma once

#include "rankev/linalg.hpp"

namespace rankev {

/// y | θ ~ N(Aθ, σ² I_n), θ ~ N(0, τ² I_d).
struct GaussianLinearProblem {
  Matrix a;
  Vector y;
  double sigma2 = 1.0;
  double tau2 = 1.0;

  Eigen::Index n() const { return a.rows(); }
  Eigen::Index d() const { return a.cols(); }
  /// α = τ² / σ².
  double alpha() const { return tau2 / sigma2; }
  void validate() const;
};

/// The data enter the evidence only through these quantities.
struct SufficientStats {
  Matrix gram;  // S = AᵀA
  Vector aty;   // Aᵀy
  double yty = 0.0;
  Eigen::Index n = 0;
  double sigma2 = 1.0;
  double tau2 = 1.0;

  static SufficientStats from_problem(const GaussianLinearProblem& prob);
};

struct PosteriorGaussian {
  Matrix precision;  // Λ = σ⁻² S + τ⁻² I
  Vector mean;       // μ = σ⁻² Λ⁻¹ Aᵀy
};

struct MleFit {
  Vector theta_hat;  // minimum-norm least-squares solution
  double log_lik = 0.0;
  Eigen::Index rank = 0;
};

struct EvidenceRecord {
  int n = 0;
  double log_z_exact = 0.0;
  double log_lik_mle = 0.0;
  double log_z_bic = 0.0;
  double log_z_rlct = 0.0;
  double delta_bic = 0.0;
  double delta_rlct = 0.0;
};

/// Closed-form log marginal likelihood
///   -½ (n log 2π + n log σ² + log det(I + αS) + σ⁻² (yᵀy − α yᵀA (I + αS)⁻¹ Aᵀy)).
/// Uses a Cholesky factor of I_d + αS, or of I_n + αAAᵀ when n < d.
double exact_log_evidence(const GaussianLinearProblem& prob);
/// Same quantity from the sufficient statistics (always the d × d route).
double exact_log_evidence(const SufficientStats& stats);

/// θ̂ = A⁺ y via SVD with the numerical-rank threshold, and the Gaussian
/// log-likelihood at θ̂. The log-likelihood is the same for every least-squares
/// solution.
MleFit mle_fit_term(const GaussianLinearProblem& prob);

/// log_lik − (d/2) log n. Throws DomainError for n < 2.
double bic_score(double log_lik_mle, int d, int n);
/// log_lik − λ log n. Throws DomainError for n < 2 or λ < 0.
double rlct_score(double log_lik_mle, double lambda, int n);

PosteriorGaussian posterior(const GaussianLinearProblem& prob);

/// Laplace expansion around the MAP point with the exact Hessian Λ. Exact for
/// this model, so it doubles as a consistency check on exact_log_evidence.
double full_laplace_log_evidence(const GaussianLinearProblem& prob);

/// All terms of one EvidenceRecord, with BIC penalty d/2 and RLCT penalty λ.
EvidenceRecord make_evidence_record(const GaussianLinearProblem& prob, double lambda);

}  // namespace rankev
