#pragma once

#include <cstdint>

#include "rankev/linalg.hpp"

namespace rankev {

/// y = D z + ε, z ~ N(0, τ² I_d), ε ~ N(0, σ² I_p).
struct DictionarySpec {
  int p = 0;
  int d = 0;
  Matrix dict;  // p × d
  double tau2 = 1.0;
  double sigma2 = 1.0;
  int r = 0;  // numerical rank of dict

  /// Fills p, d and r from `dict`.
  static DictionarySpec from_matrix(Matrix dict, double tau2, double sigma2);
  void validate() const;
};

struct DictionaryDataset {
  int n = 0;
  Matrix y;  // n × p, observations as rows
};

struct DictionaryPair {
  DictionarySpec minimal;       // p × r, orthonormal columns
  DictionarySpec overcomplete;  // p × d_over, same column span
};

/// Σ_y(D) = τ² D Dᵀ + σ² I_p.
Matrix marginal_covariance(const DictionarySpec& spec);

/// log p(Y | D) = −(n/2) log det(2π Σ_y) − ½ Σ_i y_iᵀ Σ_y⁻¹ y_i.
double dict_log_likelihood(const DictionarySpec& spec, const DictionaryDataset& data);

DictionaryDataset sample_dictionary_data(const DictionarySpec& spec, int n, std::uint64_t seed);

/// Minimal D: orthonormalized Gaussian p × r. Overcomplete D' = D M where the
/// Gaussian r × d_over mixing matrix M is orthonormalized across its rows, so
/// D' D'ᵀ = D Dᵀ and both members induce the same distribution on y.
DictionaryPair make_dictionary_pair(int p, int r, int d_over, std::uint64_t seed,
                                    double tau2 = 1.0, double sigma2 = 1.0);

/// Eigenvalues of DᵀD in descending order (squared singular values of D,
/// zero-padded to length d).
Vector gram_spectrum(const DictionarySpec& spec);

/// Number of gram_spectrum entries whose singular value clears the rank threshold.
Eigen::Index spectrum_rank(const DictionarySpec& spec);

/// max over D (p × shape_d) of log p(Y | D). The optimal τ² D Dᵀ keeps the top
/// min(shape_d, p) eigenvectors of C = YᵀY / n with eigenvalues max(ℓ_j − σ², 0).
double ml_fit_term(const DictionaryDataset& data, int shape_d, double tau2, double sigma2);

/// A dictionary attaining ml_fit_term (for checks and inspection).
Matrix ml_dictionary(const DictionaryDataset& data, int shape_d, double tau2, double sigma2);

struct DictionaryComparison {
  int n = 0;
  int r = 0;
  int d_minimal = 0;
  int d_overcomplete = 0;
  double exact_minimal = 0.0;       // log p(Y | D) at the ground-truth dictionary
  double exact_overcomplete = 0.0;  // log p(Y | D')
  double fit_minimal = 0.0;         // ml_fit_term with shape d
  double fit_overcomplete = 0.0;    // ml_fit_term with shape d'
  double bic_minimal = 0.0;         // fit − (d/2) log n
  double bic_overcomplete = 0.0;    // fit − (d'/2) log n
  double rlct_minimal = 0.0;        // fit − (r/2) log n
  double rlct_overcomplete = 0.0;
  // Same scores with the fit term evaluated at the ground-truth dictionaries.
  double bic_minimal_truth = 0.0;
  double bic_overcomplete_truth = 0.0;
  double rlct_minimal_truth = 0.0;
  double rlct_overcomplete_truth = 0.0;
};

/// Data is drawn from the minimal member; both members are scored on the same Y.
DictionaryComparison dictionary_comparison(const DictionaryPair& pair, int n, std::uint64_t seed);
/// Scores an already-sampled dataset.
DictionaryComparison dictionary_comparison(const DictionaryPair& pair,
                                           const DictionaryDataset& data);

}  // namespace rankev
