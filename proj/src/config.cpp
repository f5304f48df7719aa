#include "rankev/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "rankev/errors.hpp"

namespace rankev {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "study", "d", "p", "ranks", "sigma2", "tau2", "n_grid", "seeds", "output_dir"};

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds(20);
  std::iota(seeds.begin(), seeds.end(), 0);
  return seeds;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_integer(std::string_view text, std::string_view key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("override '" + std::string(key) + "': '" + std::string(text) +
                      "' is not an integer");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view key) {
  const std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError("override '" + std::string(key) + "': '" + s + "' is not a number");
  }
  return value;
}

/// `a..b`, `a..bxK`, or comma-separated integers.
template <class T>
std::vector<T> parse_integer_list(std::string_view text, std::string_view key) {
  std::vector<T> out;
  const auto dots = text.find("..");
  if (dots != std::string_view::npos) {
    const T lo = parse_integer<T>(text.substr(0, dots), key);
    std::string_view rest = text.substr(dots + 2);
    const auto x = rest.find('x');
    if (x == std::string_view::npos) {
      const T hi = parse_integer<T>(rest, key);
      if (hi < lo) throw ConfigError("override '" + std::string(key) + "': empty range");
      for (T v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      const T hi = parse_integer<T>(rest.substr(0, x), key);
      const T factor = parse_integer<T>(rest.substr(x + 1), key);
      if (factor < 2 || lo < 1 || hi < lo) {
        throw ConfigError("override '" + std::string(key) +
                          "': geometric range needs 1 <= a <= b and K >= 2");
      }
      for (T v = lo; v <= hi; v *= factor) out.push_back(v);
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - start));
    out.push_back(parse_integer<T>(item, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T json_get(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

std::string_view study_name(Study study) {
  switch (study) {
    case Study::kRankSweep: return "rank_sweep";
    case Study::kRegularVsSingular: return "regular_vs_singular";
    case Study::kDictCompare: return "dict_compare";
    case Study::kEstimateRlct: return "estimate_rlct";
  }
  return "unknown";
}

Study parse_study(std::string_view name) {
  for (Study s : {Study::kRankSweep, Study::kRegularVsSingular, Study::kDictCompare,
                  Study::kEstimateRlct}) {
    if (study_name(s) == name) return s;
  }
  throw ConfigError("unknown study '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(Study study) {
  ExperimentConfig cfg;
  cfg.study = study;
  cfg.seeds = default_seeds();
  switch (study) {
    case Study::kRankSweep:
    case Study::kEstimateRlct:
      break;
    case Study::kRegularVsSingular:
      cfg.ranks = {cfg.d - 2, cfg.d};
      break;
    case Study::kDictCompare:
      cfg.p = 8;
      cfg.ranks = {3};
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (d < 1 || p < 1) throw ConfigError("d and p must be >= 1");
  if (!(sigma2 > 0.0) || !(tau2 > 0.0)) throw ConfigError("sigma2 and tau2 must be > 0");
  if (ranks.empty()) throw ConfigError("ranks must not be empty");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (n_grid.size() < 2) throw ConfigError("n_grid needs at least 2 points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("n_grid values must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  if (std::set<int>(ranks.begin(), ranks.end()).size() != ranks.size()) {
    throw ConfigError("ranks must be distinct");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }

  if (study == Study::kDictCompare) {
    if (ranks.size() != 1) throw ConfigError("dict_compare takes exactly one rank (the span dimension)");
    const int r = ranks.front();
    if (r < 1 || r > p) throw ConfigError("dict_compare rank must satisfy 1 <= r <= p");
    if (d <= r) throw ConfigError("dict_compare needs overcomplete width d > r");
    return;
  }
  for (int r : ranks) {
    if (r < 1 || r > std::min(p, d)) throw ConfigError("every rank must satisfy 1 <= r <= min(p, d)");
  }
  if (study == Study::kRegularVsSingular) {
    if (ranks.size() != 2 || std::count(ranks.begin(), ranks.end(), d) != 1) {
      throw ConfigError("regular_vs_singular needs exactly two ranks, one equal to d");
    }
  }
}

int ExperimentConfig::table_n() const {
  if (std::find(n_grid.begin(), n_grid.end(), 200) != n_grid.end()) return 200;
  return n_grid[n_grid.size() / 2];
}

json to_json(const ExperimentConfig& cfg) {
  return json{{"study", std::string(study_name(cfg.study))},
              {"d", cfg.d},
              {"p", cfg.p},
              {"ranks", cfg.ranks},
              {"sigma2", cfg.sigma2},
              {"tau2", cfg.tau2},
              {"n_grid", cfg.n_grid},
              {"seeds", cfg.seeds},
              {"output_dir", cfg.output_dir}};
}

ExperimentConfig apply_json(ExperimentConfig cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "study") {
      if (parse_study(json_get<std::string>(value, key)) != cfg.study) {
        throw ConfigError("config study '" + value.get<std::string>() +
                          "' does not match the requested study '" +
                          std::string(study_name(cfg.study)) + "'");
      }
    } else if (key == "d") {
      cfg.d = json_get<int>(value, key);
    } else if (key == "p") {
      cfg.p = json_get<int>(value, key);
    } else if (key == "ranks") {
      cfg.ranks = json_get<std::vector<int>>(value, key);
    } else if (key == "sigma2") {
      cfg.sigma2 = json_get<double>(value, key);
    } else if (key == "tau2") {
      cfg.tau2 = json_get<double>(value, key);
    } else if (key == "n_grid") {
      cfg.n_grid = json_get<std::vector<int>>(value, key);
    } else if (key == "seeds") {
      cfg.seeds = json_get<std::vector<std::uint64_t>>(value, key);
    } else if (key == "output_dir") {
      cfg.output_dir = json_get<std::string>(value, key);
    }
  }
  return cfg;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, std::string_view overrides) {
  // Split on commas; a piece without '=' continues the previous value, so
  // "ranks=4,6,seeds=0..4" yields ranks="4,6" and seeds="0..4".
  std::vector<std::pair<std::string, std::string>> assignments;
  std::size_t start = 0;
  while (start < overrides.size()) {
    auto comma = overrides.find(',', start);
    if (comma == std::string_view::npos) comma = overrides.size();
    const std::string piece = trim(overrides.substr(start, comma - start));
    start = comma + 1;
    if (piece.empty()) continue;
    const auto eq = piece.find('=');
    if (eq == std::string::npos) {
      if (assignments.empty()) throw ConfigError("override '" + piece + "' is missing '='");
      assignments.back().second += "," + piece;
    } else {
      assignments.emplace_back(trim(piece.substr(0, eq)), trim(piece.substr(eq + 1)));
    }
  }

  for (const auto& [key, value] : assignments) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown override key '" + key + "'");
    if (key == "study") {
      if (parse_study(value) != cfg.study) throw ConfigError("override study does not match subcommand");
    } else if (key == "d") {
      cfg.d = parse_integer<int>(value, key);
    } else if (key == "p") {
      cfg.p = parse_integer<int>(value, key);
    } else if (key == "ranks") {
      cfg.ranks = parse_integer_list<int>(value, key);
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_real(value, key);
    } else if (key == "tau2") {
      cfg.tau2 = parse_real(value, key);
    } else if (key == "n_grid") {
      cfg.n_grid = parse_integer_list<int>(value, key);
    } else if (key == "seeds") {
      cfg.seeds = parse_integer_list<std::uint64_t>(value, key);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    }
  }
  return cfg;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

std::optional<Study> document_study(const json& doc) {
  if (!doc.is_object() || !doc.contains("study")) return std::nullopt;
  return parse_study(json_get<std::string>(doc["study"], "study"));
}

ExperimentConfig load_config(const std::string& path, std::optional<Study> required_study) {
  const json doc = read_config_file(path);
  const Study study = required_study.value_or(document_study(doc).value_or(Study::kRankSweep));
  return apply_json(ExperimentConfig::defaults(study), doc);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("output_dir");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rankev
