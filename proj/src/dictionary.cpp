#include "rankev/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankev/errors.hpp"
#include "rankev/random.hpp"

namespace rankev {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kMaxPairAttempts = 16;

Matrix orthonormal_columns(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

/// Eigenvalues (descending) and matching eigenvectors of the sample covariance.
struct SampleSpectrum {
  Vector values;
  Matrix vectors;
};

SampleSpectrum sample_spectrum(const DictionaryDataset& data) {
  const Matrix cov = data.y.transpose() * data.y / static_cast<double>(data.n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("ml_fit_term: eigensolver failed");
  return {eig.eigenvalues().reverse(), eig.eigenvectors().rowwise().reverse()};
}

void check_fit_args(const DictionaryDataset& data, int shape_d, double tau2, double sigma2) {
  if (data.n < 1 || data.y.rows() != data.n) throw DomainError("ml_fit_term: need n >= 1 rows");
  if (shape_d < 0) throw DomainError("ml_fit_term: shape_d must be >= 0");
  if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw DomainError("ml_fit_term: variances must be > 0");
}

}  // namespace

DictionarySpec DictionarySpec::from_matrix(Matrix dict, double tau2, double sigma2) {
  DictionarySpec spec;
  spec.p = static_cast<int>(dict.rows());
  spec.d = static_cast<int>(dict.cols());
  spec.r = static_cast<int>(numerical_rank(dict));
  spec.dict = std::move(dict);
  spec.tau2 = tau2;
  spec.sigma2 = sigma2;
  spec.validate();
  return spec;
}

void DictionarySpec::validate() const {
  if (dict.rows() != p || dict.cols() != d) throw DimensionError("DictionarySpec: D must be p x d");
  if (r < 0 || r > std::min(p, d)) throw DimensionError("DictionarySpec: r out of range");
  if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw DomainError("DictionarySpec: variances must be > 0");
}

Matrix marginal_covariance(const DictionarySpec& spec) {
  Matrix cov = spec.tau2 * spec.dict * spec.dict.transpose();
  cov.diagonal().array() += spec.sigma2;
  return cov;
}

double dict_log_likelihood(const DictionarySpec& spec, const DictionaryDataset& data) {
  spec.validate();
  if (data.y.rows() != data.n || data.y.cols() != spec.p) {
    throw DimensionError("dict_log_likelihood: data must be n x p");
  }
  const SpdFactor factor(marginal_covariance(spec), "dict_log_likelihood");
  const auto n = static_cast<double>(data.n);
  const double quad = factor.inverse_quadratic_trace(data.y.transpose());
  return -0.5 * n * (spec.p * kLog2Pi + factor.log_det()) - 0.5 * quad;
}

DictionaryDataset sample_dictionary_data(const DictionarySpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw DimensionError("sample_dictionary_data: n must be >= 1");
  const auto nn = static_cast<std::uint64_t>(n);
  RandomStream latent(seed, StreamTag::kDictLatent, nn);
  RandomStream noise(seed, StreamTag::kDictNoise, nn);
  DictionaryDataset data;
  data.n = n;
  const Matrix z = latent.normal_matrix(n, spec.d, std::sqrt(spec.tau2));
  data.y = z * spec.dict.transpose() + noise.normal_matrix(n, spec.p, std::sqrt(spec.sigma2));
  return data;
}

DictionaryPair make_dictionary_pair(int p, int r, int d_over, std::uint64_t seed, double tau2,
                                    double sigma2) {
  if (r <= 0 || r > p) {
    throw DomainError("make_dictionary_pair: need 0 < r <= p, got r=" + std::to_string(r));
  }
  if (d_over <= r) {
    throw DomainError("make_dictionary_pair: overcomplete width must exceed r, got d_over=" +
                      std::to_string(d_over));
  }
  for (int attempt = 0; attempt < kMaxPairAttempts; ++attempt) {
    const auto a = static_cast<std::uint64_t>(attempt);
    RandomStream basis_stream(derive_key({seed, static_cast<std::uint64_t>(StreamTag::kDictBasis), a}));
    RandomStream mix_stream(derive_key({seed, static_cast<std::uint64_t>(StreamTag::kDictMixing), a}));
    const Matrix basis = orthonormal_columns(basis_stream.normal_matrix(p, r));
    const Matrix gaussian_mix = mix_stream.normal_matrix(r, d_over);
    if (numerical_rank(gaussian_mix) != r || numerical_rank(basis) != r) continue;
    // Orthonormal rows: M Mᵀ = I_r.
    const Matrix mix = orthonormal_columns(gaussian_mix.transpose()).transpose();

    DictionaryPair pair;
    pair.minimal = DictionarySpec::from_matrix(basis, tau2, sigma2);
    pair.overcomplete = DictionarySpec::from_matrix(basis * mix, tau2, sigma2);
    if (pair.minimal.r == r && pair.overcomplete.r == r) return pair;
  }
  throw NumericalError("make_dictionary_pair: could not build a rank-" + std::to_string(r) + " pair");
}

Vector gram_spectrum(const DictionarySpec& spec) {
  Vector spectrum = Vector::Zero(spec.d);
  if (spec.dict.size() == 0) return spectrum;
  Eigen::JacobiSVD<Matrix> svd(spec.dict);
  const Vector& s = svd.singularValues();
  spectrum.head(s.size()) = s.array().square().matrix();
  return spectrum;
}

Eigen::Index spectrum_rank(const DictionarySpec& spec) {
  if (spec.dict.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(spec.dict);
  return count_above_tolerance(svd.singularValues(), spec.p, spec.d);
}

double ml_fit_term(const DictionaryDataset& data, int shape_d, double tau2, double sigma2) {
  check_fit_args(data, shape_d, tau2, sigma2);
  const SampleSpectrum spec = sample_spectrum(data);
  const auto p = spec.values.size();
  const Eigen::Index k = std::min<Eigen::Index>(shape_d, p);
  double log_det = 0.0;
  double trace = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    // Negative round-off in ℓ_j is clamped like any sub-noise direction.
    const double ell = std::max(spec.values(j), 0.0);
    const double model = j < k ? std::max(ell, sigma2) : sigma2;
    log_det += std::log(model);
    trace += ell / model;
  }
  const auto n = static_cast<double>(data.n);
  return -0.5 * n * (static_cast<double>(p) * kLog2Pi + log_det + trace);
}

Matrix ml_dictionary(const DictionaryDataset& data, int shape_d, double tau2, double sigma2) {
  check_fit_args(data, shape_d, tau2, sigma2);
  const SampleSpectrum spec = sample_spectrum(data);
  const auto p = spec.values.size();
  Matrix dict = Matrix::Zero(p, shape_d);
  const Eigen::Index k = std::min<Eigen::Index>(shape_d, p);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double excess = std::max(spec.values(j) - sigma2, 0.0);
    dict.col(j) = spec.vectors.col(j) * std::sqrt(excess / tau2);
  }
  return dict;
}

DictionaryComparison dictionary_comparison(const DictionaryPair& pair,
                                           const DictionaryDataset& data) {
  const DictionarySpec& dmin = pair.minimal;
  const DictionarySpec& dover = pair.overcomplete;
  if (dmin.p != dover.p) throw DimensionError("dictionary_comparison: members differ in p");
  if (data.n < 2) throw DomainError("dictionary_comparison: need n >= 2");

  DictionaryComparison c;
  c.n = data.n;
  c.r = dmin.r;
  c.d_minimal = dmin.d;
  c.d_overcomplete = dover.d;
  c.exact_minimal = dict_log_likelihood(dmin, data);
  c.exact_overcomplete = dict_log_likelihood(dover, data);
  c.fit_minimal = ml_fit_term(data, dmin.d, dmin.tau2, dmin.sigma2);
  c.fit_overcomplete = ml_fit_term(data, dover.d, dover.tau2, dover.sigma2);

  const double log_n = std::log(static_cast<double>(data.n));
  const double half_r = 0.5 * c.r;
  c.bic_minimal = c.fit_minimal - 0.5 * dmin.d * log_n;
  c.bic_overcomplete = c.fit_overcomplete - 0.5 * dover.d * log_n;
  c.rlct_minimal = c.fit_minimal - half_r * log_n;
  c.rlct_overcomplete = c.fit_overcomplete - half_r * log_n;
  c.bic_minimal_truth = c.exact_minimal - 0.5 * dmin.d * log_n;
  c.bic_overcomplete_truth = c.exact_overcomplete - 0.5 * dover.d * log_n;
  c.rlct_minimal_truth = c.exact_minimal - half_r * log_n;
  c.rlct_overcomplete_truth = c.exact_overcomplete - half_r * log_n;
  return c;
}

DictionaryComparison dictionary_comparison(const DictionaryPair& pair, int n, std::uint64_t seed) {
  return dictionary_comparison(pair, sample_dictionary_data(pair.minimal, n, seed));
}

}  // namespace rankev
