#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rankev/experiments.hpp"

namespace rankev {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Writes to `<path>.tmp` and renames over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Columns: study, rank, d, p, seed, n, log_z_exact, log_lik_mle, log_z_bic,
/// log_z_rlct, delta_bic, delta_rlct. Failed cells carry nan values.
std::string evidence_records_csv(const StudyResult& result);
std::vector<CellResult> parse_evidence_records_csv(std::string_view text);

/// Columns: rank, slope_delta_bic, stderr_bic, slope_delta_rlct, stderr_rlct,
/// lambda_hat, lambda_analytic, n_seeds, n_points.
std::string slopes_csv(const std::vector<RankSummary>& rows);
std::string per_seed_slopes_csv(const StudyResult& result);

/// `quantity,value` rows for the single-n dictionary table.
std::string dict_compare_csv(const DictStudyResult& result);
std::string dict_records_csv(const DictStudyResult& result);
std::string dict_slopes_csv(const DictStudyResult& result);

/// Raw records first, then aggregates, effective_config.json, and a
/// run_metadata.json sidecar holding the timestamp.
void write_study_outputs(const StudyResult& result, const std::filesystem::path& dir);
void write_dict_outputs(const DictStudyResult& result, const std::filesystem::path& dir);

}  // namespace rankev
