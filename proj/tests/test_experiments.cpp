#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rankev/errors.hpp"
#include "rankev/experiments.hpp"
#include "rankev/output.hpp"
#include "rankev/plot.hpp"

using namespace rankev;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(Study study = Study::kRankSweep) {
  auto cfg = ExperimentConfig::defaults(study);
  cfg = apply_overrides(cfg, "seeds=0..3,n_grid=50..800x2");
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rankev_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("serial and parallel cells are bitwise identical") {
  const auto cfg = small_config();
  const auto serial = compute_regression_cells(cfg, Execution::kSerial);
  const auto parallel = compute_regression_cells(cfg, Execution::kParallel);
  REQUIRE(serial.size() == cfg.ranks.size() * cfg.seeds.size() * cfg.n_grid.size());
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].rank == parallel[i].rank);
    CHECK(serial[i].seed == parallel[i].seed);
    CHECK(serial[i].n == parallel[i].n);
    CHECK(serial[i].record.log_z_exact == parallel[i].record.log_z_exact);
    CHECK(serial[i].record.delta_bic == parallel[i].record.delta_bic);
  }
}

TEST_CASE("records obey the penalty identity and config order") {
  const auto cfg = small_config();
  const auto cells = compute_regression_cells(cfg, Execution::kParallel);
  size_t i = 0;
  for (int rank : cfg.ranks) {
    for (auto seed : cfg.seeds) {
      for (int n : cfg.n_grid) {
        const auto& c = cells[i++];
        CHECK(c.rank == rank);
        CHECK(c.seed == seed);
        CHECK(c.n == n);
        CHECK(c.ok);
        const double gap = c.record.delta_bic - c.record.delta_rlct;
        CHECK(std::abs(gap - (c.lambda - 0.5 * c.d) * std::log(double(n))) < 1e-12);
      }
    }
  }
}

TEST_CASE("aggregation from persisted records reproduces the slopes") {
  const auto result = run_rank_sweep(small_config());
  const auto text = evidence_records_csv(result);
  StudyResult reloaded;
  reloaded.config = result.config;
  reloaded.cells = parse_evidence_records_csv(text);
  REQUIRE(reloaded.cells.size() == result.cells.size());
  aggregate(reloaded);
  REQUIRE(reloaded.ranks.size() == result.ranks.size());
  for (size_t k = 0; k < result.ranks.size(); ++k) {
    CHECK(std::abs(reloaded.ranks[k].bic.slope - result.ranks[k].bic.slope) < 1e-10);
    CHECK(std::abs(reloaded.ranks[k].rlct.slope - result.ranks[k].rlct.slope) < 1e-10);
    CHECK(std::abs(reloaded.ranks[k].lambda_hat - result.ranks[k].lambda_hat) < 1e-10);
  }
}

TEST_CASE("output files are byte-identical across runs and execution modes") {
  const auto cfg = small_config();
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  write_study_outputs(run_rank_sweep(cfg, Execution::kParallel), a);
  write_study_outputs(run_rank_sweep(cfg, Execution::kSerial), b);
  for (const char* f : {"evidence_records.csv", "slopes.csv", "per_seed_slopes.csv", "summary.txt",
                        "effective_config.json"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  CHECK(fs::exists(a / "run_metadata.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("slopes csv header") {
  const auto result = run_rank_sweep(small_config());
  const auto csv = slopes_csv(result.ranks);
  CHECK(csv.rfind("rank,slope_delta_bic,stderr_bic,slope_delta_rlct,stderr_rlct,lambda_hat,"
                  "lambda_analytic,n_seeds,n_points\n",
                  0) == 0);
}

TEST_CASE("failed cells are listed and excluded") {
  auto result = run_rank_sweep(small_config());
  result.cells[3].record.log_z_exact = std::numeric_limits<double>::quiet_NaN();
  result.cells[3].record.delta_bic = std::numeric_limits<double>::quiet_NaN();
  aggregate(result);
  const auto summary = summarize(result);
  CHECK(summary.failed_cells == 1);
  std::ostringstream where;
  where << "rank=" << result.cells[3].rank << " seed=" << result.cells[3].seed
        << " n=" << result.cells[3].n;
  CHECK(summary.text.find(where.str()) != std::string::npos);
  for (const auto& r : result.ranks) CHECK(std::isfinite(r.bic.slope));
}

TEST_CASE("two-point single-seed run") {
  auto cfg = ExperimentConfig::defaults(Study::kRankSweep);
  cfg = apply_overrides(cfg, "seeds=7,n_grid=100,400,ranks=2");
  const auto result = run_rank_sweep(cfg);
  REQUIRE(result.ranks.size() == 1);
  CHECK(result.ranks[0].ok);
  CHECK(result.ranks[0].n_points == 2);
  CHECK(result.ranks[0].bic.stderr_slope == 0.0);
  CHECK_FALSE(result.aborted());
}

TEST_CASE("regular_vs_singular mean curves and plot files") {
  const auto result = run_regular_vs_singular(small_config(Study::kRegularVsSingular));
  CHECK(result.mean_curves.size() == 2 * 5);
  const auto dir = scratch("plots");
  const auto files = emit_plot_data(result, dir, true);
  CHECK(fs::exists(dir / "fig2_regular.tsv"));
  CHECK(fs::exists(dir / "fig3_singular.tsv"));
  const auto tsv = slurp(dir / "fig2_regular.tsv");
  CHECK(tsv.rfind("log_n\tn\tdelta_bic\tdelta_rlct\n", 0) == 0);
  bool has_svg = false;
  for (const auto& f : files) has_svg = has_svg || f.extension() == ".svg";
  CHECK(has_svg);
  fs::remove_all(dir);
}

TEST_CASE("rank sweep plot data and empty result") {
  const auto result = run_rank_sweep(small_config());
  const auto dir = scratch("fig1");
  emit_plot_data(result, dir, false);
  const auto tsv = slurp(dir / "fig1_rank_sweep.tsv");
  CHECK(tsv.rfind("rank\tslope_bic\tslope_rlct\tstderr_bic\tstderr_rlct\n", 0) == 0);
  fs::remove_all(dir);

  StudyResult empty;
  empty.config = small_config();
  const auto edir = scratch("empty");
  CHECK_THROWS_AS(emit_plot_data(empty, edir, false), DomainError);
  CHECK_FALSE(fs::exists(edir / "fig1_rank_sweep.tsv"));
}

TEST_CASE("dictionary study") {
  auto cfg = ExperimentConfig::defaults(Study::kDictCompare);
  cfg = apply_overrides(cfg, "seeds=0..2,n_grid=50..800x2");
  const auto result = run_dict_compare(cfg, Execution::kSerial);
  CHECK(result.ok);
  CHECK(result.table_n == 200);
  CHECK(std::abs(result.exact_gap.slope) < 1e-9);
  CHECK(result.spectrum_rank_overcomplete == std::vector<int>{3, 3, 3});
  const auto again = run_dict_compare(cfg, Execution::kParallel);
  CHECK(dict_records_csv(result) == dict_records_csv(again));
  CHECK(summarize(result).size() > 0);
  const auto dir = scratch("dict");
  emit_plot_data(result, dir, false);
  CHECK(slurp(dir / "fig5_eigenspectra.tsv").rfind("index\teig_minimal\teig_overcomplete\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, -293.8, 1e-300, 12345.678901234567, 3.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("unwritable output directory") {
  const auto file = scratch("blocker");
  { std::ofstream(file) << "x"; }
  CHECK_THROWS_AS(write_file_atomic(file / "sub" / "a.csv", "1"), IoError);
  fs::remove_all(file);
}
