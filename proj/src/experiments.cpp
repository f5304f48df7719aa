#include "rankev/experiments.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "rankev/errors.hpp"
#include "rankev/linear_models.hpp"
#include "rankev/output.hpp"
#include "rankev/random.hpp"

namespace rankev {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string version_string() { return RANKEV_VERSION; }

bool record_finite(const EvidenceRecord& r) {
  return std::isfinite(r.log_z_exact) && std::isfinite(r.log_lik_mle) &&
         std::isfinite(r.log_z_bic) && std::isfinite(r.log_z_rlct) &&
         std::isfinite(r.delta_bic) && std::isfinite(r.delta_rlct);
}

bool usable(const CellResult& c) { return c.ok && record_finite(c.record); }

EvidenceRecord failed_record(int n) {
  return EvidenceRecord{n, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
}

/// Dataset stream seed for one (seed, rank) pair so ranks draw independently.
std::uint64_t dataset_seed(std::uint64_t seed, int rank) {
  return derive_key({seed, static_cast<std::uint64_t>(rank)});
}

StudyResult run_regression_study(const ExperimentConfig& cfg, Study expected, Execution exec) {
  if (cfg.study != expected) throw ConfigError("config study does not match the requested run");
  cfg.validate();
  StudyResult result;
  result.config = cfg;
  result.config_hash = config_hash(cfg);
  result.code_version = version_string();
  result.cells = compute_regression_cells(cfg, exec);
  aggregate(result);
  return result;
}

std::optional<SlopeFit> try_fit(const std::vector<LogNPoint>& pts, std::string& error) {
  try {
    return fit_log_n_slope(pts);
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

}  // namespace

bool StudyResult::aborted() const {
  return std::any_of(ranks.begin(), ranks.end(), [](const RankSummary& r) { return !r.ok; });
}

std::vector<CellResult> compute_regression_cells(const ExperimentConfig& cfg, Execution exec) {
  const std::size_t n_ranks = cfg.ranks.size();
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_sizes = cfg.n_grid.size();

  // Specs first: one per (rank, seed), shared by every n.
  struct SpecSlot {
    std::optional<RankRegressionSpec> spec;
    std::string error;
  };
  std::vector<SpecSlot> specs(n_ranks * n_seeds);
  for_each_index(specs.size(), exec, [&](std::size_t i) {
    const int r = cfg.ranks[i / n_seeds];
    const std::uint64_t seed = cfg.seeds[i % n_seeds];
    try {
      specs[i].spec = make_rank_regression_spec(cfg.p, cfg.d, r, cfg.sigma2, cfg.tau2, seed);
    } catch (const std::exception& e) {
      specs[i].error = e.what();
    }
  });

  std::vector<CellResult> cells(specs.size() * n_sizes);
  for_each_index(cells.size(), exec, [&](std::size_t i) {
    const std::size_t spec_index = i / n_sizes;
    CellResult& cell = cells[i];
    cell.rank = cfg.ranks[spec_index / n_seeds];
    cell.seed = cfg.seeds[spec_index % n_seeds];
    cell.n = cfg.n_grid[i % n_sizes];
    cell.d = cfg.d;
    cell.p = cfg.p;
    cell.lambda = analytic_rlct(cell.rank).lambda;
    const SpecSlot& slot = specs[spec_index];
    if (!slot.spec) {
      cell.ok = false;
      cell.error = slot.error;
      cell.record = failed_record(cell.n);
      return;
    }
    try {
      const DataGenConfig gen{InputCovariance::kIdentity, dataset_seed(cell.seed, cell.rank)};
      const RegressionDataset data = sample_dataset(*slot.spec, cell.n, gen);
      const GaussianLinearProblem prob{data.a, data.y, cfg.sigma2, cfg.tau2};
      cell.record = make_evidence_record(prob, cell.lambda);
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
      cell.record = failed_record(cell.n);
    }
  });
  return cells;
}

void aggregate(StudyResult& result) {
  const ExperimentConfig& cfg = result.config;
  result.ranks.clear();
  result.per_seed.clear();
  result.mean_curves.clear();

  for (int rank : cfg.ranks) {
    RankSummary summary;
    summary.rank = rank;
    summary.lambda_analytic = analytic_rlct(rank).lambda;
    summary.predicted = predicted_bic_error_slope(cfg.d, rank);

    // Seed means per n, accumulated in config order.
    std::map<int, MeanDeltaPoint> by_n;
    std::map<int, double> mean_log_z;
    std::map<std::uint64_t, std::vector<const CellResult*>> by_seed;
    for (const CellResult& c : result.cells) {
      if (c.rank != rank || !usable(c)) continue;
      MeanDeltaPoint& pt = by_n[c.n];
      pt.rank = rank;
      pt.n = c.n;
      pt.delta_bic += c.record.delta_bic;
      pt.delta_rlct += c.record.delta_rlct;
      pt.centered += c.record.log_z_exact - c.record.log_lik_mle;
      pt.n_seeds += 1;
      mean_log_z[c.n] += c.record.log_z_exact;
      by_seed[c.seed].push_back(&c);
    }

    std::vector<LogNPoint> bic_pts;
    std::vector<LogNPoint> rlct_pts;
    std::vector<LogNPoint> centered_pts;
    std::vector<LogNPoint> log_z_pts;
    for (auto& [n, pt] : by_n) {
      const double k = pt.n_seeds;
      pt.delta_bic /= k;
      pt.delta_rlct /= k;
      pt.centered /= k;
      bic_pts.push_back({n, pt.delta_bic});
      rlct_pts.push_back({n, pt.delta_rlct});
      centered_pts.push_back({n, pt.centered});
      log_z_pts.push_back({n, mean_log_z[n] / k});
      result.mean_curves.push_back(pt);
    }
    summary.n_points = static_cast<int>(by_n.size());
    summary.n_seeds = static_cast<int>(by_seed.size());

    const auto bic = try_fit(bic_pts, summary.error);
    const auto rlct = try_fit(rlct_pts, summary.error);
    const auto centered = try_fit(centered_pts, summary.error);
    const auto log_z = try_fit(log_z_pts, summary.error);
    if (bic && rlct && centered && log_z) {
      summary.bic = *bic;
      summary.rlct = *rlct;
      summary.lambda_hat = -centered->slope;
      summary.lambda_literal = -0.5 * log_z->slope;
    } else {
      summary.ok = false;
      summary.bic.slope = summary.rlct.slope = kNaN;
      summary.lambda_hat = summary.lambda_literal = kNaN;
      if (summary.error.empty()) summary.error = "slope fit failed";
    }
    result.ranks.push_back(summary);

    for (const auto& [seed, cells] : by_seed) {
      std::vector<LogNPoint> sb;
      std::vector<LogNPoint> sr;
      std::vector<LogNPoint> sc;
      for (const CellResult* c : cells) {
        sb.push_back({c->n, c->record.delta_bic});
        sr.push_back({c->n, c->record.delta_rlct});
        sc.push_back({c->n, c->record.log_z_exact - c->record.log_lik_mle});
      }
      std::string ignored;
      const auto fb = try_fit(sb, ignored);
      const auto fr = try_fit(sr, ignored);
      const auto fc = try_fit(sc, ignored);
      result.per_seed.push_back(SeedSlope{rank, seed, fb ? fb->slope : kNaN,
                                          fr ? fr->slope : kNaN, fc ? -fc->slope : kNaN});
    }
  }
}

StudyResult run_rank_sweep(const ExperimentConfig& cfg, Execution exec) {
  return run_regression_study(cfg, Study::kRankSweep, exec);
}

StudyResult run_regular_vs_singular(const ExperimentConfig& cfg, Execution exec) {
  return run_regression_study(cfg, Study::kRegularVsSingular, exec);
}

StudyResult run_estimate_rlct(const ExperimentConfig& cfg, Execution exec) {
  return run_regression_study(cfg, Study::kEstimateRlct, exec);
}

DictStudyResult run_dict_compare(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.study != Study::kDictCompare) throw ConfigError("config study must be dict_compare");
  cfg.validate();
  const int r = cfg.ranks.front();
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_sizes = cfg.n_grid.size();

  DictStudyResult result;
  result.config = cfg;
  result.config_hash = config_hash(cfg);
  result.code_version = version_string();
  result.table_n = cfg.table_n();

  std::vector<std::optional<DictionaryPair>> pairs(n_seeds);
  std::vector<std::string> pair_errors(n_seeds);
  for_each_index(n_seeds, exec, [&](std::size_t i) {
    try {
      pairs[i] = make_dictionary_pair(cfg.p, r, cfg.d, cfg.seeds[i], cfg.tau2, cfg.sigma2);
    } catch (const std::exception& e) {
      pair_errors[i] = e.what();
    }
  });

  result.cells.resize(n_seeds * n_sizes);
  for_each_index(result.cells.size(), exec, [&](std::size_t i) {
    DictCell& cell = result.cells[i];
    const std::size_t s = i / n_sizes;
    cell.seed = cfg.seeds[s];
    cell.n = cfg.n_grid[i % n_sizes];
    if (!pairs[s]) {
      cell.ok = false;
      cell.error = pair_errors[s];
      return;
    }
    try {
      cell.comparison = dictionary_comparison(*pairs[s], cell.n, cell.seed);
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });

  for (std::size_t s = 0; s < n_seeds; ++s) {
    result.spectrum_rank_minimal.push_back(pairs[s] ? static_cast<int>(spectrum_rank(pairs[s]->minimal)) : -1);
    result.spectrum_rank_overcomplete.push_back(
        pairs[s] ? static_cast<int>(spectrum_rank(pairs[s]->overcomplete)) : -1);
  }
  if (pairs.front()) {
    result.spectrum_minimal = gram_spectrum(pairs.front()->minimal);
    result.spectrum_overcomplete = gram_spectrum(pairs.front()->overcomplete);
    try {
      result.table = dictionary_comparison(*pairs.front(), result.table_n, cfg.seeds.front());
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
    }
  } else {
    result.ok = false;
    result.error = pair_errors.front();
  }

  // Seed-mean gaps per n.
  std::map<int, std::array<double, 4>> sums;
  std::map<int, int> counts;
  for (const DictCell& c : result.cells) {
    if (!c.ok) continue;
    const DictionaryComparison& k = c.comparison;
    auto& acc = sums[c.n];
    acc[0] += k.exact_minimal - k.exact_overcomplete;
    acc[1] += k.bic_minimal - k.bic_overcomplete;
    acc[2] += k.rlct_minimal - k.rlct_overcomplete;
    acc[3] += k.fit_minimal - k.fit_overcomplete;
    counts[c.n] += 1;
  }
  std::array<std::vector<LogNPoint>, 4> pts;
  for (const auto& [n, acc] : sums) {
    for (std::size_t q = 0; q < 4; ++q) pts[q].push_back({n, acc[q] / counts[n]});
  }
  std::array<std::optional<SlopeFit>, 4> fits;
  for (std::size_t q = 0; q < 4; ++q) fits[q] = try_fit(pts[q], result.error);
  if (fits[0] && fits[1] && fits[2] && fits[3]) {
    result.exact_gap = *fits[0];
    result.bic_gap = *fits[1];
    result.rlct_gap = *fits[2];
    result.fit_gap = *fits[3];
  } else {
    result.ok = false;
  }
  return result;
}

Summary summarize(const StudyResult& result) {
  Summary out;
  std::vector<RankSummary> rows = result.ranks;
  std::sort(rows.begin(), rows.end(),
            [](const RankSummary& a, const RankSummary& b) { return a.rank < b.rank; });

  std::ostringstream text;
  text << "study " << study_name(result.config.study) << "  d=" << result.config.d
       << "  p=" << result.config.p << "  seeds=" << result.config.seeds.size()
       << "  grid=" << result.config.n_grid.front() << ".." << result.config.n_grid.back() << "\n";
  text << "rank  pred_bic  slope_bic  stderr_bic  slope_rlct  stderr_rlct  lambda_hat  r/2\n";
  char line[256];
  for (const RankSummary& r : rows) {
    std::snprintf(line, sizeof line, "%4d  %8.3f  %9.3f  %10.3f  %10.3f  %11.3f  %10.3f  %4.1f\n",
                  r.rank, r.predicted.table1_slope, r.bic.slope, r.bic.stderr_slope, r.rlct.slope,
                  r.rlct.stderr_slope, r.lambda_hat, r.lambda_analytic);
    text << line;
  }

  std::vector<const CellResult*> failed;
  for (const CellResult& c : result.cells) {
    if (!usable(c)) failed.push_back(&c);
  }
  std::sort(failed.begin(), failed.end(), [](const CellResult* a, const CellResult* b) {
    return std::tie(a->rank, a->seed, a->n) < std::tie(b->rank, b->seed, b->n);
  });
  out.failed_cells = static_cast<int>(failed.size());
  if (!failed.empty()) {
    text << "failed cells: " << failed.size() << "\n";
    for (const CellResult* c : failed) {
      text << "  rank=" << c->rank << " seed=" << c->seed << " n=" << c->n << ": "
           << (c->error.empty() ? "non-finite record" : c->error) << "\n";
    }
  }
  for (const RankSummary& r : rows) {
    if (!r.ok) text << "rank " << r.rank << " not summarized: " << r.error << "\n";
  }

  out.text = text.str();
  out.csv = slopes_csv(rows);
  return out;
}

std::string summarize(const DictStudyResult& result) {
  std::ostringstream text;
  const DictionaryComparison& t = result.table;
  char line[256];
  text << "study dict_compare  p=" << result.config.p << "  r=" << result.config.ranks.front()
       << "  d'=" << result.config.d << "  seeds=" << result.config.seeds.size() << "\n";
  text << "table at n=" << result.table_n << " (seed " << result.config.seeds.front() << ")\n";
  const std::pair<const char*, double> rows[] = {
      {"exact_minimal", t.exact_minimal},       {"exact_overcomplete", t.exact_overcomplete},
      {"bic_minimal", t.bic_minimal},           {"bic_overcomplete", t.bic_overcomplete},
      {"rlct_minimal", t.rlct_minimal},         {"rlct_overcomplete", t.rlct_overcomplete},
      {"bic_minimal_truth", t.bic_minimal_truth}, {"bic_overcomplete_truth", t.bic_overcomplete_truth},
  };
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof line, "  %-24s %12.2f\n", name, value);
    text << line;
  }
  text << "gap slopes vs log n (seed means)\n";
  std::snprintf(line, sizeof line,
                "  exact  %7.3f +- %.3f\n  bic    %7.3f +- %.3f  (predicted %+.1f)\n  rlct   %7.3f +- %.3f\n",
                result.exact_gap.slope, result.exact_gap.stderr_slope, result.bic_gap.slope,
                result.bic_gap.stderr_slope, 0.5 * (result.config.d - result.config.ranks.front()),
                result.rlct_gap.slope, result.rlct_gap.stderr_slope);
  text << line;
  int failed = 0;
  for (const DictCell& c : result.cells) {
    if (!c.ok) {
      if (failed++ == 0) text << "failed cells:\n";
      text << "  seed=" << c.seed << " n=" << c.n << ": " << c.error << "\n";
    }
  }
  if (!result.ok) text << "study incomplete: " << result.error << "\n";
  return text.str();
}

}  // namespace rankev
