#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rankev {

enum class Study { kRankSweep, kRegularVsSingular, kDictCompare, kEstimateRlct };

std::string_view study_name(Study study);
Study parse_study(std::string_view name);

/// Field names match the JSON config document. For dict_compare, `d` is the
/// overcomplete width d' and `ranks` holds the single span dimension r.
struct ExperimentConfig {
  Study study = Study::kRankSweep;
  int d = 6;
  int p = 6;
  std::vector<int> ranks{1, 2, 3, 4, 5, 6};
  double sigma2 = 1.0;
  double tau2 = 1.0;
  std::vector<int> n_grid{50, 100, 200, 400, 800, 1600, 3200, 6400, 12800};
  std::vector<std::uint64_t> seeds;  // default 0..19
  std::string output_dir = "results";

  /// Defaults for a study: p = 6 and ranks 1..6 for regression sweeps, ranks
  /// {d−2, d} for regular_vs_singular, p = 8 and ranks {3} for dict_compare.
  static ExperimentConfig defaults(Study study);

  /// Throws ConfigError naming the violated invariant.
  void validate() const;

  /// Sample size used for the single-n dictionary table: 200 when on the grid,
  /// otherwise the middle grid point.
  int table_n() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Applies the keys of `doc` over `base`. Unknown keys and ill-typed values
/// throw ConfigError. A "study" key must agree with base.study.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& doc);

/// Parses `key=value,key=value` with list values `a..b` (inclusive),
/// `a..bxK` (geometric, factor K) or comma-separated items.
ExperimentConfig apply_overrides(ExperimentConfig base, std::string_view overrides);

/// Parses a JSON config file. Throws ConfigError on I/O or syntax errors.
nlohmann::json read_config_file(const std::string& path);

/// Study named by a config document, if any.
std::optional<Study> document_study(const nlohmann::json& doc);

/// Defaults for the study, overlaid with the file. With no `required_study`
/// the file's "study" key (or rank_sweep) decides.
ExperimentConfig load_config(const std::string& path, std::optional<Study> required_study);

/// FNV-1a of the canonical JSON (output_dir excluded), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace rankev
