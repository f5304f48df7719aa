#include "rankev/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rankev/errors.hpp"

namespace rankev {
namespace {

namespace fs = std::filesystem;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double_field(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + std::string(s) + "' in records CSV");
  }
  return v;
}

template <class T>
T parse_int_field(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("malformed integer '" + std::string(s) + "' in records CSV");
  }
  return v;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void write_metadata(const fs::path& dir, const ExperimentConfig& cfg, const std::string& hash,
                    const std::string& version) {
  write_file_atomic(dir / "effective_config.json", to_json(cfg).dump(2) + "\n");
  const nlohmann::json meta{{"config_hash", hash},
                            {"code_version", version},
                            {"study", std::string(study_name(cfg.study))},
                            {"finished_utc", utc_timestamp()}};
  write_file_atomic(dir / "run_metadata.json", meta.dump(2) + "\n");
}

const char* kRecordHeader =
    "study,rank,d,p,seed,n,log_z_exact,log_lik_mle,log_z_bic,log_z_rlct,delta_bic,delta_rlct";

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

std::string evidence_records_csv(const StudyResult& result) {
  std::string out = kRecordHeader;
  out += '\n';
  const std::string study(study_name(result.config.study));
  for (const CellResult& c : result.cells) {
    const EvidenceRecord& r = c.record;
    out += study + ',' + std::to_string(c.rank) + ',' + std::to_string(c.d) + ',' +
           std::to_string(c.p) + ',' + std::to_string(c.seed) + ',' + std::to_string(c.n) + ',' +
           format_double(r.log_z_exact) + ',' + format_double(r.log_lik_mle) + ',' +
           format_double(r.log_z_bic) + ',' + format_double(r.log_z_rlct) + ',' +
           format_double(r.delta_bic) + ',' + format_double(r.delta_rlct) + '\n';
  }
  return out;
}

std::vector<CellResult> parse_evidence_records_csv(std::string_view text) {
  std::vector<CellResult> cells;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != kRecordHeader) throw IoError("unexpected evidence_records.csv header");
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 12) throw IoError("evidence_records.csv row has wrong field count");
    CellResult c;
    c.rank = parse_int_field<int>(f[1]);
    c.d = parse_int_field<int>(f[2]);
    c.p = parse_int_field<int>(f[3]);
    c.seed = parse_int_field<std::uint64_t>(f[4]);
    c.n = parse_int_field<int>(f[5]);
    c.lambda = 0.5 * c.rank;
    c.record = EvidenceRecord{c.n,
                              parse_double_field(f[6]),
                              parse_double_field(f[7]),
                              parse_double_field(f[8]),
                              parse_double_field(f[9]),
                              parse_double_field(f[10]),
                              parse_double_field(f[11])};
    c.ok = std::isfinite(c.record.log_z_exact);
    cells.push_back(std::move(c));
  }
  return cells;
}

std::string slopes_csv(const std::vector<RankSummary>& rows) {
  std::string out =
      "rank,slope_delta_bic,stderr_bic,slope_delta_rlct,stderr_rlct,lambda_hat,lambda_analytic,"
      "n_seeds,n_points\n";
  for (const RankSummary& r : rows) {
    out += std::to_string(r.rank) + ',' + format_double(r.bic.slope) + ',' +
           format_double(r.bic.stderr_slope) + ',' + format_double(r.rlct.slope) + ',' +
           format_double(r.rlct.stderr_slope) + ',' + format_double(r.lambda_hat) + ',' +
           format_double(r.lambda_analytic) + ',' + std::to_string(r.n_seeds) + ',' +
           std::to_string(r.n_points) + '\n';
  }
  return out;
}

std::string per_seed_slopes_csv(const StudyResult& result) {
  std::string out = "rank,seed,slope_delta_bic,slope_delta_rlct,lambda_hat\n";
  for (const SeedSlope& s : result.per_seed) {
    out += std::to_string(s.rank) + ',' + std::to_string(s.seed) + ',' +
           format_double(s.slope_delta_bic) + ',' + format_double(s.slope_delta_rlct) + ',' +
           format_double(s.lambda_hat) + '\n';
  }
  return out;
}

std::string dict_compare_csv(const DictStudyResult& result) {
  const DictionaryComparison& t = result.table;
  std::string out = "quantity,value\n";
  out += "exact_minimal," + format_double(t.exact_minimal) + '\n';
  out += "exact_overcomplete," + format_double(t.exact_overcomplete) + '\n';
  out += "bic_minimal," + format_double(t.bic_minimal) + '\n';
  out += "bic_overcomplete," + format_double(t.bic_overcomplete) + '\n';
  out += "rlct_minimal," + format_double(t.rlct_minimal) + '\n';
  out += "rlct_overcomplete," + format_double(t.rlct_overcomplete) + '\n';
  return out;
}

std::string dict_records_csv(const DictStudyResult& result) {
  std::string out =
      "seed,n,r,d_minimal,d_overcomplete,exact_minimal,exact_overcomplete,fit_minimal,"
      "fit_overcomplete,bic_minimal,bic_overcomplete,rlct_minimal,rlct_overcomplete\n";
  const double nan = std::nan("");
  for (const DictCell& c : result.cells) {
    const DictionaryComparison& k = c.comparison;
    auto v = [&](double x) { return format_double(c.ok ? x : nan); };
    out += std::to_string(c.seed) + ',' + std::to_string(c.n) + ',' + std::to_string(k.r) + ',' +
           std::to_string(k.d_minimal) + ',' + std::to_string(k.d_overcomplete) + ',' +
           v(k.exact_minimal) + ',' + v(k.exact_overcomplete) + ',' + v(k.fit_minimal) + ',' +
           v(k.fit_overcomplete) + ',' + v(k.bic_minimal) + ',' + v(k.bic_overcomplete) + ',' +
           v(k.rlct_minimal) + ',' + v(k.rlct_overcomplete) + '\n';
  }
  return out;
}

std::string dict_slopes_csv(const DictStudyResult& result) {
  std::string out = "gap,slope,stderr,intercept,n_points\n";
  const std::pair<const char*, const SlopeFit*> rows[] = {{"exact", &result.exact_gap},
                                                          {"bic", &result.bic_gap},
                                                          {"rlct", &result.rlct_gap},
                                                          {"fit", &result.fit_gap}};
  for (const auto& [name, fit] : rows) {
    out += std::string(name) + ',' + format_double(fit->slope) + ',' +
           format_double(fit->stderr_slope) + ',' + format_double(fit->intercept) + ',' +
           std::to_string(fit->n_points) + '\n';
  }
  return out;
}

void write_study_outputs(const StudyResult& result, const fs::path& dir) {
  prepare_dir(dir);
  write_file_atomic(dir / "evidence_records.csv", evidence_records_csv(result));
  const Summary summary = summarize(result);
  write_file_atomic(dir / "slopes.csv", summary.csv);
  write_file_atomic(dir / "per_seed_slopes.csv", per_seed_slopes_csv(result));
  write_file_atomic(dir / "summary.txt", summary.text);
  write_metadata(dir, result.config, result.config_hash, result.code_version);
}

void write_dict_outputs(const DictStudyResult& result, const fs::path& dir) {
  prepare_dir(dir);
  write_file_atomic(dir / "dict_records.csv", dict_records_csv(result));
  write_file_atomic(dir / "dict_compare.csv", dict_compare_csv(result));
  write_file_atomic(dir / "dict_slopes.csv", dict_slopes_csv(result));
  write_file_atomic(dir / "summary.txt", summarize(result));
  write_metadata(dir, result.config, result.config_hash, result.code_version);
}

}  // namespace rankev
