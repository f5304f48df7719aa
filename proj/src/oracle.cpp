#include "rankev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rankev/errors.hpp"
#include "rankev/random.hpp"

namespace rankev {
namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

double integrate_checked(const auto& f, double lo, double hi, const QuadratureSettings& s,
                         const char* what) {
  double error = 0.0;
  const double value = Kronrod::integrate(f, lo, hi, s.max_subdivisions, s.rel_tol, &error);
  if (!std::isfinite(value) || value <= 0.0 || error > s.rel_tol * value) {
    throw OracleError(std::string("quadrature_log_evidence: ") + what +
                      " integral did not converge (value " + std::to_string(value) + ", error " +
                      std::to_string(error) + ")");
  }
  return value;
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("QuadratureSettings: rel_tol must be > 0");
  if (!(integration_radius >= 8.0)) {
    throw DomainError("QuadratureSettings: integration_radius must be >= 8");
  }
  if (max_subdivisions == 0) throw DomainError("QuadratureSettings: max_subdivisions must be > 0");
}

double log_joint(const GaussianLinearProblem& prob, const Vector& theta) {
  return log_normal_iid(prob.y - prob.a * theta, prob.sigma2) + log_normal_iid(theta, prob.tau2);
}

double quadrature_log_evidence(const GaussianLinearProblem& prob,
                               const QuadratureSettings& settings) {
  prob.validate();
  settings.validate();
  const auto d = prob.d();
  if (d > 2) throw DomainError("quadrature_log_evidence: d must be <= 2");
  if (d == 0) return log_normal_iid(prob.y, prob.sigma2);

  const PosteriorGaussian post = posterior(prob);
  const Matrix cov = post.precision.inverse();
  const double peak = log_joint(prob, post.mean);
  const double radius = settings.integration_radius;

  if (d == 1) {
    const double sd = std::sqrt(cov(0, 0));
    Vector theta(1);
    auto f = [&](double t) {
      theta(0) = t;
      return std::exp(log_joint(prob, theta) - peak);
    };
    const double mass =
        integrate_checked(f, post.mean(0) - radius * sd, post.mean(0) + radius * sd, settings, "1-D");
    return peak + std::log(mass);
  }

  // θ₁ over its marginal, θ₂ | θ₁ over its conditional.
  const double sd1 = std::sqrt(cov(0, 0));
  const double cond_slope = cov(1, 0) / cov(0, 0);
  const double cond_sd = std::sqrt(std::max(cov(1, 1) - cov(1, 0) * cond_slope, 0.0));
  QuadratureSettings inner = settings;
  inner.rel_tol = settings.rel_tol * 0.1;

  auto outer = [&](double t1) {
    const double center = post.mean(1) + cond_slope * (t1 - post.mean(0));
    Vector theta(2);
    theta(0) = t1;
    auto f = [&](double t2) {
      theta(1) = t2;
      return std::exp(log_joint(prob, theta) - peak);
    };
    // The conditional slice may carry negligible mass far in the tails.
    theta(1) = center;
    if (log_joint(prob, theta) - peak < -700.0) return 0.0;
    double error = 0.0;
    return Kronrod::integrate(f, center - radius * cond_sd, center + radius * cond_sd,
                              inner.max_subdivisions, inner.rel_tol, &error);
  };
  const double mass = integrate_checked(outer, post.mean(0) - radius * sd1,
                                        post.mean(0) + radius * sd1, settings, "2-D outer");
  return peak + std::log(mass);
}

ImportanceEstimate importance_log_evidence(const GaussianLinearProblem& prob, int n_samples,
                                           std::uint64_t seed, double proposal_scale) {
  prob.validate();
  if (prob.d() > 5) throw DomainError("importance_log_evidence: d must be <= 5");
  if (n_samples < 1000) throw DomainError("importance_log_evidence: need n_samples >= 1000");
  if (!(proposal_scale > 0.0)) throw DomainError("importance_log_evidence: scale must be > 0");

  const auto d = prob.d();
  const PosteriorGaussian post = posterior(prob);
  const SpdFactor precision(post.precision, "importance_log_evidence");
  Eigen::LLT<Matrix> llt(0.5 * (post.precision + post.precision.transpose()));
  const auto upper = llt.matrixU();

  RandomStream stream(seed, StreamTag::kOracle, static_cast<std::uint64_t>(n_samples));
  const double log_q_const = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                             static_cast<double>(d) * std::log(proposal_scale) +
                             0.5 * precision.log_det();

  std::vector<double> log_w(static_cast<std::size_t>(n_samples));
  for (auto& lw : log_w) {
    const Vector z = stream.normal_vector(d);
    // θ = μ + scale · U⁻¹ z has covariance scale² Λ⁻¹.
    const Vector theta = post.mean + proposal_scale * upper.solve(z);
    const double log_q = log_q_const - 0.5 * z.squaredNorm();
    lw = log_joint(prob, theta) - log_q;
  }

  const double max_lw = *std::max_element(log_w.begin(), log_w.end());
  const auto count = static_cast<double>(n_samples);
  double sum_w = 0.0;
  double mean_lw = 0.0;
  for (double lw : log_w) {
    sum_w += std::exp(lw - max_lw);
    mean_lw += lw;
  }
  mean_lw /= count;
  const double mean_w = sum_w / count;

  // Two-pass variances; the conjugate proposal gives weights equal to round-off.
  double var_lw = 0.0;
  double var_w = 0.0;
  for (double lw : log_w) {
    var_lw += (lw - mean_lw) * (lw - mean_lw);
    const double dw = std::exp(lw - max_lw) - mean_w;
    var_w += dw * dw;
  }
  var_lw /= (count - 1.0);
  var_w /= (count - 1.0);

  ImportanceEstimate est;
  est.estimate = max_lw + std::log(mean_w);
  est.stderr_log = std::sqrt(var_w / count) / mean_w;
  est.log_weight_variance = var_lw;
  return est;
}

GaussianLinearProblem random_test_problem(std::uint64_t seed, int max_d, int max_n) {
  RandomStream stream(seed, StreamTag::kTestProblem);
  auto pick = [&](int hi) { return 1 + static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(hi)); };
  auto log_uniform = [&] { return std::exp(std::log(0.1) + stream.uniform() * std::log(100.0)); };

  const int d = pick(max_d);
  const int n = pick(max_n);
  GaussianLinearProblem prob;
  prob.sigma2 = log_uniform();
  prob.tau2 = log_uniform();
  if (d > 1 && stream.next_u64() % 3 == 0) {
    const int r = pick(d - 1);
    prob.a = stream.normal_matrix(n, r) * stream.normal_matrix(r, d);
  } else {
    prob.a = stream.normal_matrix(n, d);
  }
  const Vector theta = stream.normal_vector(d, std::sqrt(prob.tau2));
  prob.y = prob.a * theta + stream.normal_vector(n, std::sqrt(prob.sigma2));
  return prob;
}

bool VerificationReport::passed() const {
  return quadrature_failures == 0 && max_quadrature_abs_diff < kQuadratureTol &&
         max_laplace_rel_diff < kLaplaceRelTol && max_importance_z < kImportanceZ &&
         max_importance_conjugate_stderr < kConjugateStderr;
}

VerificationReport run_verification_suite(int quadrature_problems, int laplace_problems,
                                          int importance_problems, std::uint64_t seed) {
  VerificationReport report;
  for (int i = 0; i < quadrature_problems; ++i) {
    const auto prob = random_test_problem(derive_key({seed, 1, static_cast<std::uint64_t>(i)}), 2, 50);
    ++report.quadrature_problems;
    try {
      const double diff = std::abs(exact_log_evidence(prob) - quadrature_log_evidence(prob));
      report.max_quadrature_abs_diff = std::max(report.max_quadrature_abs_diff, diff);
    } catch (const OracleError&) {
      ++report.quadrature_failures;
    }
  }
  for (int i = 0; i < laplace_problems; ++i) {
    const auto prob =
        random_test_problem(derive_key({seed, 2, static_cast<std::uint64_t>(i)}), 20, 1000);
    ++report.laplace_problems;
    const double exact = exact_log_evidence(prob);
    const double rel = std::abs(full_laplace_log_evidence(prob) - exact) / std::abs(exact);
    report.max_laplace_rel_diff = std::max(report.max_laplace_rel_diff, rel);
  }
  for (int i = 0; i < importance_problems; ++i) {
    const auto prob = random_test_problem(derive_key({seed, 3, static_cast<std::uint64_t>(i)}), 5, 60);
    ++report.importance_problems;
    const double exact = exact_log_evidence(prob);
    const auto conj = importance_log_evidence(prob, 2000, seed + static_cast<std::uint64_t>(i));
    report.max_importance_conjugate_stderr =
        std::max(report.max_importance_conjugate_stderr, conj.stderr_log);
    const auto wide = importance_log_evidence(prob, 20000, seed + static_cast<std::uint64_t>(i), 2.0);
    report.max_importance_z =
        std::max(report.max_importance_z, std::abs(wide.estimate - exact) / wide.stderr_log);
  }
  return report;
}

}  // namespace rankev
