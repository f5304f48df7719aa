#include "rankev/linear_models.hpp"

#include <cmath>
#include <string>

#include "rankev/errors.hpp"
#include "rankev/random.hpp"

namespace rankev {
namespace {

constexpr int kMaxFactorAttempts = 16;

void check_rank_dims(int p, int d, int r) {
  if (p <= 0 || d <= 0 || r <= 0 || r > std::min(p, d)) {
    throw DimensionError("rank factor requires 0 < r <= min(p, d); got p=" + std::to_string(p) +
                         ", d=" + std::to_string(d) + ", r=" + std::to_string(r));
  }
}

Matrix orthonormal_columns(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

void RankRegressionSpec::validate() const {
  check_rank_dims(p, d, r);
  if (b_star.rows() != p || b_star.cols() != d) {
    throw DimensionError("b_star must be p x d");
  }
  if (theta_star.size() != d) throw DimensionError("theta_star must have length d");
  if (!(sigma2 > 0.0) || !(tau2 > 0.0)) throw DomainError("sigma2 and tau2 must be positive");
}

Matrix make_rank_r_factor(int p, int d, int r, std::uint64_t seed) {
  check_rank_dims(p, d, r);
  for (int attempt = 0; attempt < kMaxFactorAttempts; ++attempt) {
    RandomStream stream(derive_key({seed, static_cast<std::uint64_t>(StreamTag::kFactor),
                                    static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(attempt)}));
    const Matrix u = orthonormal_columns(stream.normal_matrix(p, r));
    const Matrix v = orthonormal_columns(stream.normal_matrix(d, r));
    Matrix b = u * v.transpose();
    if (numerical_rank(b) == r) return b;
  }
  throw NumericalError("make_rank_r_factor: could not produce a rank-" + std::to_string(r) +
                       " factor");
}

RankRegressionSpec make_rank_regression_spec(int p, int d, int r, double sigma2, double tau2,
                                             std::uint64_t seed) {
  if (!(sigma2 > 0.0) || !(tau2 > 0.0)) throw DomainError("sigma2 and tau2 must be positive");
  RankRegressionSpec spec;
  spec.p = p;
  spec.d = d;
  spec.r = r;
  spec.b_star = make_rank_r_factor(p, d, r, seed);
  RandomStream theta_stream(seed, StreamTag::kTheta, static_cast<std::uint64_t>(r));
  spec.theta_star = theta_stream.normal_vector(d, std::sqrt(tau2));
  spec.sigma2 = sigma2;
  spec.tau2 = tau2;
  return spec;
}

RegressionDataset sample_dataset(const RankRegressionSpec& spec, int n, const DataGenConfig& cfg) {
  spec.validate();
  if (n < 1) throw DimensionError("sample_dataset: n must be >= 1");
  const auto nn = static_cast<std::uint64_t>(n);
  RandomStream design(cfg.seed, StreamTag::kDesign, nn);
  RandomStream noise(cfg.seed, StreamTag::kNoise, nn);

  RegressionDataset data;
  data.n = n;
  switch (cfg.input_covariance) {
    case InputCovariance::kIdentity:
      data.x = design.normal_matrix(n, spec.p);
      break;
  }
  data.a = data.x * spec.b_star;
  data.y = data.a * spec.theta_star + noise.normal_vector(n, std::sqrt(spec.sigma2));
  return data;
}

Matrix population_gram(const RankRegressionSpec& spec) {
  // Σ_x = I_p is the only supported input covariance.
  return spec.b_star.transpose() * spec.b_star;
}

}  // namespace rankev
