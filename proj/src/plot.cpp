#include "rankev/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "rankev/errors.hpp"
#include "rankev/output.hpp"

namespace rankev {
namespace {

namespace fs = std::filesystem;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Table {
  std::string header;
  std::vector<std::string> rows;

  std::string str() const {
    std::string out = header + "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
  }
};

/// Writes all files only after every one has been rendered.
std::vector<fs::path> write_all(const fs::path& dir,
                                const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create plot directory '" + dir.string() + "'");
  std::vector<fs::path> written;
  for (const auto& [name, body] : files) {
    write_file_atomic(dir / name, body);
    written.push_back(dir / name);
  }
  return written;
}

std::map<int, std::vector<MeanDeltaPoint>> curves_by_rank(const StudyResult& result) {
  std::map<int, std::vector<MeanDeltaPoint>> out;
  for (const MeanDeltaPoint& p : result.mean_curves) out[p.rank].push_back(p);
  return out;
}

void add_delta_figure(std::vector<std::pair<std::string, std::string>>& files,
                      const std::string& stem, const std::string& title,
                      const std::vector<MeanDeltaPoint>& curve, bool with_svg) {
  Table t{"log_n\tn\tdelta_bic\tdelta_rlct", {}};
  PlotSpec plot{title, "log n", "approximate − exact log evidence", {}};
  PlotSeries bic{"Δ_BIC", {}, {}, false};
  PlotSeries rlct{"Δ_RLCT", {}, {}, false};
  for (const MeanDeltaPoint& p : curve) {
    const double log_n = std::log(static_cast<double>(p.n));
    t.rows.push_back(format_double(log_n) + "\t" + std::to_string(p.n) + "\t" +
                     format_double(p.delta_bic) + "\t" + format_double(p.delta_rlct));
    bic.x.push_back(log_n);
    bic.y.push_back(p.delta_bic);
    rlct.x.push_back(log_n);
    rlct.y.push_back(p.delta_rlct);
  }
  files.emplace_back(stem + ".tsv", t.str());
  if (with_svg) {
    plot.series = {bic, rlct};
    files.emplace_back(stem + ".svg", render_svg(plot));
  }
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(plot.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << fmt(yv) << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << py(0) << "\" y2=\""
        << py(0) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape_xml(plot.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(plot.y_label) << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += fmt(px(s.x[i]), "%.2f") + "," + fmt(py(s.y[i]), "%.2f") + " ";
      svg << "<circle cx=\"" << fmt(px(s.x[i]), "%.2f") << "\" cy=\"" << fmt(py(s.y[i]), "%.2f")
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    if (!s.markers_only && !points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << points << "\"/>\n";
    }
    const double ly = kTop + 14 + 16 * static_cast<double>(si);
    svg << "<rect x=\"" << kLeft + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n";
    svg << "<text x=\"" << kLeft + 26 << "\" y=\"" << ly << "\">" << escape_xml(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<fs::path> emit_plot_data(const StudyResult& result, const fs::path& dir, bool with_svg) {
  if (result.cells.empty() || result.ranks.empty()) {
    throw DomainError("emit_plot_data: empty study result");
  }
  std::vector<std::pair<std::string, std::string>> files;

  if (result.config.study == Study::kRegularVsSingular) {
    const auto curves = curves_by_rank(result);
    for (const auto& [rank, curve] : curves) {
      const bool regular = rank == result.config.d;
      add_delta_figure(files, regular ? "fig2_regular" : "fig3_singular",
                       regular ? "Regular model (r = d = " + std::to_string(rank) + ")"
                               : "Singular model (r = " + std::to_string(rank) +
                                     ", d = " + std::to_string(result.config.d) + ")",
                       curve, with_svg);
    }
  } else {
    Table t{"rank\tslope_bic\tslope_rlct\tstderr_bic\tstderr_rlct", {}};
    PlotSeries bic{"slope Δ_BIC", {}, {}, false};
    PlotSeries rlct{"slope Δ_RLCT", {}, {}, false};
    PlotSeries predicted{"−(d − r)/2", {}, {}, true};
    for (const RankSummary& r : result.ranks) {
      t.rows.push_back(std::to_string(r.rank) + "\t" + format_double(r.bic.slope) + "\t" +
                       format_double(r.rlct.slope) + "\t" + format_double(r.bic.stderr_slope) +
                       "\t" + format_double(r.rlct.stderr_slope));
      bic.x.push_back(r.rank);
      bic.y.push_back(r.bic.slope);
      rlct.x.push_back(r.rank);
      rlct.y.push_back(r.rlct.slope);
      predicted.x.push_back(r.rank);
      predicted.y.push_back(r.predicted.table1_slope);
    }
    files.emplace_back("fig1_rank_sweep.tsv", t.str());
    if (with_svg) {
      files.emplace_back("fig1_rank_sweep.svg",
                         render_svg({"Rank sweep in linear regression", "intrinsic rank r",
                                     "slope versus log n", {bic, rlct, predicted}}));
    }
  }
  return write_all(dir, files);
}

std::vector<fs::path> emit_plot_data(const DictStudyResult& result, const fs::path& dir,
                                     bool with_svg) {
  if (result.cells.empty() || result.spectrum_overcomplete.size() == 0) {
    throw DomainError("emit_plot_data: empty dictionary result");
  }
  std::vector<std::pair<std::string, std::string>> files;

  std::map<int, std::array<double, 3>> sums;
  std::map<int, int> counts;
  for (const DictCell& c : result.cells) {
    if (!c.ok) continue;
    const auto& k = c.comparison;
    auto& acc = sums[c.n];
    acc[0] += k.exact_minimal - k.exact_overcomplete;
    acc[1] += k.bic_minimal - k.bic_overcomplete;
    acc[2] += k.rlct_minimal - k.rlct_overcomplete;
    counts[c.n] += 1;
  }
  Table gaps{"log_n\tn\texact_gap\tbic_gap\trlct_gap", {}};
  PlotSeries exact{"exact gap", {}, {}, false};
  PlotSeries bic{"BIC gap", {}, {}, false};
  PlotSeries rlct{"RLCT-aware gap", {}, {}, false};
  for (const auto& [n, acc] : sums) {
    const double log_n = std::log(static_cast<double>(n));
    const double k = counts[n];
    gaps.rows.push_back(format_double(log_n) + "\t" + std::to_string(n) + "\t" +
                        format_double(acc[0] / k) + "\t" + format_double(acc[1] / k) + "\t" +
                        format_double(acc[2] / k));
    exact.x.push_back(log_n);
    exact.y.push_back(acc[0] / k);
    bic.x.push_back(log_n);
    bic.y.push_back(acc[1] / k);
    rlct.x.push_back(log_n);
    rlct.y.push_back(acc[2] / k);
  }
  files.emplace_back("fig4_dict_evidence.tsv", gaps.str());

  Table eig{"index\teig_minimal\teig_overcomplete", {}};
  PlotSeries emin{"DᵀD (minimal)", {}, {}, true};
  PlotSeries eover{"D'ᵀD' (overcomplete)", {}, {}, true};
  const auto len = std::max(result.spectrum_minimal.size(), result.spectrum_overcomplete.size());
  for (Eigen::Index i = 0; i < len; ++i) {
    std::string row = std::to_string(i + 1) + "\t";
    if (i < result.spectrum_minimal.size()) {
      row += format_double(result.spectrum_minimal(i));
      emin.x.push_back(static_cast<double>(i + 1));
      emin.y.push_back(result.spectrum_minimal(i));
    }
    row += "\t";
    if (i < result.spectrum_overcomplete.size()) {
      row += format_double(result.spectrum_overcomplete(i));
      eover.x.push_back(static_cast<double>(i + 1));
      eover.y.push_back(result.spectrum_overcomplete(i));
    }
    eig.rows.push_back(row);
  }
  files.emplace_back("fig5_eigenspectra.tsv", eig.str());

  if (with_svg) {
    files.emplace_back("fig4_dict_evidence.svg",
                       render_svg({"Minimal minus overcomplete log evidence", "log n",
                                   "score gap", {exact, bic, rlct}}));
    files.emplace_back("fig5_eigenspectra.svg",
                       render_svg({"Eigenvalue spectra of DᵀD and D'ᵀD'", "eigenvalue index",
                                   "eigenvalue", {emin, eover}}));
  }
  return write_all(dir, files);
}

}  // namespace rankev
