#pragma once

#include <cstdint>
#include <initializer_list>

#include <Eigen/Dense>

namespace rankev {

/// Purpose tags that separate random streams drawn from one user seed.
enum class StreamTag : std::uint64_t {
  kFactor = 1,
  kTheta = 2,
  kDesign = 3,
  kNoise = 4,
  kDictBasis = 5,
  kDictMixing = 6,
  kDictLatent = 7,
  kDictNoise = 8,
  kOracle = 9,
  kTestProblem = 10,
};

/// Hashes a sequence of 64-bit words into one stream key with the SplitMix64
/// finalizer. Distinct (seed, tag, n, ...) tuples give unrelated streams, so
/// adding a sample size never perturbs existing draws.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> words);

/// Counter-based generator: output k is splitmix64(key + (k+1)·golden).
/// The sequence is fully specified by the algorithm, independent of the
/// platform's standard library. Normals use the Box-Muller transform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}
  RandomStream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0)
      : key_(derive_key({seed, static_cast<std::uint64_t>(tag), index})) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  double normal();

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);
  Eigen::VectorXd normal_vector(Eigen::Index size, double stddev = 1.0);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rankev
