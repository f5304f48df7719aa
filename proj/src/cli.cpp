#include "rankev/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rankev/errors.hpp"
#include "rankev/experiments.hpp"
#include "rankev/oracle.hpp"
#include "rankev/output.hpp"
#include "rankev/plot.hpp"

namespace rankev {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string overrides;
  std::string output_dir;
  bool plot = false;
};

/// defaults < env output dir < config file < overrides < --output-dir. With
/// no `study`, the config file's study (or rank_sweep) is used.
ExperimentConfig effective_config(const Invocation& inv, std::optional<Study> study) {
  const nlohmann::json doc =
      inv.config_path.empty() ? nlohmann::json::object() : read_config_file(inv.config_path);
  const Study chosen = study.value_or(document_study(doc).value_or(Study::kRankSweep));
  ExperimentConfig cfg = ExperimentConfig::defaults(chosen);
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  cfg = apply_json(cfg, doc);
  if (!inv.overrides.empty()) cfg = apply_overrides(cfg, inv.overrides);
  if (!inv.output_dir.empty()) cfg.output_dir = inv.output_dir;
  cfg.validate();
  return cfg;
}

int finish_regression(const StudyResult& result, const Invocation& inv, std::ostream& out,
                      std::ostream& err) {
  const fs::path dir = result.config.output_dir;
  write_study_outputs(result, dir);
  emit_plot_data(result, dir, inv.plot);
  const Summary summary = summarize(result);
  out << summary.text;
  if (result.aborted()) {
    err << "study aborted: at least one rank could not be summarized\n";
    return kExitNumericalFailure;
  }
  return kExitOk;
}

int cmd_study(const Invocation& inv, Study study, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = effective_config(inv, study);
  switch (study) {
    case Study::kRankSweep:
      return finish_regression(run_rank_sweep(cfg), inv, out, err);
    case Study::kRegularVsSingular:
      return finish_regression(run_regular_vs_singular(cfg), inv, out, err);
    case Study::kEstimateRlct: {
      const StudyResult result = run_estimate_rlct(cfg);
      const int code = finish_regression(result, inv, out, err);
      out << "\nrank  lambda_hat  lambda_literal  r/2\n";
      char line[128];
      for (const RankSummary& r : result.ranks) {
        std::snprintf(line, sizeof line, "%4d  %10.4f  %14.4f  %4.1f\n", r.rank, r.lambda_hat,
                      r.lambda_literal, r.lambda_analytic);
        out << line;
      }
      return code;
    }
    case Study::kDictCompare: {
      const DictStudyResult result = run_dict_compare(cfg);
      const fs::path dir = result.config.output_dir;
      write_dict_outputs(result, dir);
      emit_plot_data(result, dir, inv.plot);
      out << summarize(result);
      if (!result.ok) {
        err << "study aborted: " << result.error << "\n";
        return kExitNumericalFailure;
      }
      return kExitOk;
    }
  }
  return kExitConfigError;
}

/// Raw evidence records for the configured grid, without slope fitting.
int cmd_evidence(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = effective_config(inv, std::nullopt);
  if (cfg.study == Study::kDictCompare) throw ConfigError("evidence needs a regression config");

  StudyResult result;
  result.config = cfg;
  result.cells = compute_regression_cells(cfg, Execution::kParallel);
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  const std::string csv = evidence_records_csv(result);
  write_file_atomic(dir / "evidence_records.csv", csv);
  write_file_atomic(dir / "effective_config.json", to_json(cfg).dump(2) + "\n");
  out << csv;
  int failed = 0;
  for (const CellResult& c : result.cells) failed += c.ok ? 0 : 1;
  if (failed == static_cast<int>(result.cells.size())) {
    err << "every evidence cell failed\n";
    return kExitNumericalFailure;
  }
  if (failed > 0) err << failed << " cell(s) failed; see nan rows\n";
  return kExitOk;
}

int cmd_verify(std::ostream& out) {
  const VerificationReport r = run_verification_suite();
  char line[160];
  std::snprintf(line, sizeof line, "quadrature   %3d problems  max |diff|      %.3e  (tol %.0e)%s\n",
                r.quadrature_problems, r.max_quadrature_abs_diff, VerificationReport::kQuadratureTol,
                r.quadrature_failures ? "  NON-CONVERGED" : "");
  out << line;
  std::snprintf(line, sizeof line, "laplace      %3d problems  max rel diff    %.3e  (tol %.0e)\n",
                r.laplace_problems, r.max_laplace_rel_diff, VerificationReport::kLaplaceRelTol);
  out << line;
  std::snprintf(line, sizeof line, "importance   %3d problems  max z-score     %.3f      (tol %.1f)\n",
                r.importance_problems, r.max_importance_z, VerificationReport::kImportanceZ);
  out << line;
  std::snprintf(line, sizeof line, "conjugate IS              max stderr      %.3e  (tol %.0e)\n",
                r.max_importance_conjugate_stderr, VerificationReport::kConjugateStderr);
  out << line;
  out << (r.passed() ? "verify: PASS\n" : "verify: FAIL\n");
  return r.passed() ? kExitOk : kExitNumericalFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact evidence, BIC and RLCT-corrected scores for linear-Gaussian rank models",
               "rankev"};
  app.require_subcommand(1);
  Invocation inv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--overrides", inv.overrides,
                    "comma-separated key=value; ranges a..b and a..bxK");
    sub->add_option("--output-dir", inv.output_dir,
                    std::string("output directory (default: $") + kOutputDirEnv +
                        ", then config, then ./results)");
    sub->add_flag("--plot", inv.plot, "also write SVG figures");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"rank-sweep", "Δ_BIC and Δ_RLCT slopes across intrinsic ranks"},
      {"regular-vs-singular", "paired regular (r = d) and singular runs"},
      {"dict-compare", "minimal vs overcomplete dictionaries on one subspace"},
      {"estimate-rlct", "evidence-slope RLCT estimates against r/2"},
      {"evidence", "raw evidence records for a configured grid"},
      {"verify", "closed forms against quadrature and Monte-Carlo oracles"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&inv, sub] { inv.subcommand = sub->get_name(); });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfigError;
  }

  try {
    if (inv.subcommand == "rank-sweep") return cmd_study(inv, Study::kRankSweep, out, err);
    if (inv.subcommand == "regular-vs-singular") {
      return cmd_study(inv, Study::kRegularVsSingular, out, err);
    }
    if (inv.subcommand == "dict-compare") return cmd_study(inv, Study::kDictCompare, out, err);
    if (inv.subcommand == "estimate-rlct") return cmd_study(inv, Study::kEstimateRlct, out, err);
    if (inv.subcommand == "evidence") return cmd_evidence(inv, out, err);
    if (inv.subcommand == "verify") return cmd_verify(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  err << "unknown subcommand\n";
  return kExitConfigError;
}

}  // namespace rankev
