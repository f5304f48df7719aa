#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rankev/experiments.hpp"

namespace rankev {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG line/scatter chart.
std::string render_svg(const PlotSpec& plot);

/// Figure data files (TSV, and SVG when `with_svg`) for a regression study:
///   rank_sweep / estimate_rlct: fig1_rank_sweep.tsv
///     (rank, slope_bic, slope_rlct, stderr_bic, stderr_rlct)
///   regular_vs_singular: fig2_regular.tsv and fig3_singular.tsv
///     (log_n, n, delta_bic, delta_rlct; seed means)
/// Nothing is written for an empty result; that case throws DomainError.
std::vector<std::filesystem::path> emit_plot_data(const StudyResult& result,
                                                  const std::filesystem::path& dir, bool with_svg);

/// fig4_dict_evidence.tsv (log_n, n, exact_gap, bic_gap, rlct_gap) and
/// fig5_eigenspectra.tsv (index, eig_minimal, eig_overcomplete).
std::vector<std::filesystem::path> emit_plot_data(const DictStudyResult& result,
                                                  const std::filesystem::path& dir, bool with_svg);

}  // namespace rankev
