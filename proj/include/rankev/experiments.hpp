#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankev/config.hpp"
#include "rankev/dictionary.hpp"
#include "rankev/evidence.hpp"
#include "rankev/parallel.hpp"
#include "rankev/rlct.hpp"

namespace rankev {

struct CellResult {
  int rank = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
  int p = 0;
  double lambda = 0.0;
  EvidenceRecord record;
  bool ok = true;
  std::string error;
};

struct RankSummary {
  int rank = 0;
  SlopeFit bic;
  SlopeFit rlct;
  double lambda_hat = 0.0;      // −slope of the seed-mean centered evidence
  double lambda_literal = 0.0;  // −½·slope of the seed-mean log Z
  double lambda_analytic = 0.0;
  PredictedBicSlope predicted;
  int n_seeds = 0;
  int n_points = 0;
  bool ok = true;
  std::string error;
};

struct SeedSlope {
  int rank = 0;
  std::uint64_t seed = 0;
  double slope_delta_bic = 0.0;
  double slope_delta_rlct = 0.0;
  double lambda_hat = 0.0;
};

/// Seed-mean Δ values at one n, for the regular/singular curves.
struct MeanDeltaPoint {
  int rank = 0;
  int n = 0;
  double delta_bic = 0.0;
  double delta_rlct = 0.0;
  double centered = 0.0;  // log Z − log p(D | θ̂)
  int n_seeds = 0;
};

struct StudyResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;  // ordered by (rank, seed, n) as in the config
  std::vector<RankSummary> ranks;
  std::vector<SeedSlope> per_seed;
  std::vector<MeanDeltaPoint> mean_curves;
  std::string config_hash;
  std::string code_version;

  bool aborted() const;
};

/// One raw record per (rank, seed, n). Numerical failures are caught per cell.
std::vector<CellResult> compute_regression_cells(const ExperimentConfig& cfg, Execution exec);

/// Seed-averages Δ at each n, then fits slopes. Deterministic in the cell order.
void aggregate(StudyResult& result);

StudyResult run_rank_sweep(const ExperimentConfig& cfg, Execution exec = Execution::kParallel);
StudyResult run_regular_vs_singular(const ExperimentConfig& cfg,
                                    Execution exec = Execution::kParallel);
StudyResult run_estimate_rlct(const ExperimentConfig& cfg, Execution exec = Execution::kParallel);

struct DictCell {
  std::uint64_t seed = 0;
  int n = 0;
  DictionaryComparison comparison;
  bool ok = true;
  std::string error;
};

struct DictStudyResult {
  ExperimentConfig config;
  int table_n = 0;
  DictionaryComparison table;  // first seed at table_n
  Vector spectrum_minimal;     // first seed's pair
  Vector spectrum_overcomplete;
  std::vector<int> spectrum_rank_minimal;  // per seed
  std::vector<int> spectrum_rank_overcomplete;
  std::vector<DictCell> cells;  // ordered by (seed, n)
  SlopeFit exact_gap;           // log p(Y|D) − log p(Y|D') vs log n
  SlopeFit bic_gap;             // BIC(D) − BIC(D') with ML fit terms
  SlopeFit rlct_gap;
  SlopeFit fit_gap;
  std::string config_hash;
  std::string code_version;
  bool ok = true;
  std::string error;
};

DictStudyResult run_dict_compare(const ExperimentConfig& cfg, Execution exec = Execution::kParallel);

struct Summary {
  std::string text;
  std::string csv;  // slopes.csv contents
  int failed_cells = 0;
};

/// Sorted by rank; lists every failed or non-finite cell with its coordinates.
Summary summarize(const StudyResult& result);
std::string summarize(const DictStudyResult& result);

}  // namespace rankev
