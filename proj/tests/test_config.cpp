#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rankev/config.hpp"
#include "rankev/errors.hpp"

using namespace rankev;

TEST_CASE("study defaults") {
  const auto rs = ExperimentConfig::defaults(Study::kRankSweep);
  CHECK(rs.d == 6);
  CHECK(rs.p == 6);
  CHECK(rs.ranks == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(rs.n_grid == std::vector<int>{50, 100, 200, 400, 800, 1600, 3200, 6400, 12800});
  CHECK(rs.seeds.size() == 20);
  CHECK(rs.seeds.front() == 0);
  CHECK(rs.seeds.back() == 19);
  rs.validate();

  const auto rvs = ExperimentConfig::defaults(Study::kRegularVsSingular);
  CHECK(rvs.ranks == std::vector<int>{4, 6});
  rvs.validate();

  const auto dc = ExperimentConfig::defaults(Study::kDictCompare);
  CHECK(dc.p == 8);
  CHECK(dc.ranks == std::vector<int>{3});
  CHECK(dc.d == 6);
  CHECK(dc.table_n() == 200);
  dc.validate();

  ExperimentConfig::defaults(Study::kEstimateRlct).validate();
}

TEST_CASE("validation rejects bad configs") {
  auto cfg = ExperimentConfig::defaults(Study::kRankSweep);
  cfg.ranks = {0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.ranks = {7};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults(Study::kRankSweep);
  cfg.n_grid = {100};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.n_grid = {100, 50};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.n_grid = {1, 50};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults(Study::kRankSweep);
  cfg.sigma2 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults(Study::kRankSweep);
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  auto rvs = ExperimentConfig::defaults(Study::kRegularVsSingular);
  rvs.ranks = {3, 4};
  CHECK_THROWS_AS(rvs.validate(), ConfigError);

  auto dc = ExperimentConfig::defaults(Study::kDictCompare);
  dc.d = 3;
  CHECK_THROWS_AS(dc.validate(), ConfigError);
  dc = ExperimentConfig::defaults(Study::kDictCompare);
  dc.ranks = {2, 3};
  CHECK_THROWS_AS(dc.validate(), ConfigError);
}

TEST_CASE("table_n falls back to the middle grid point") {
  auto cfg = ExperimentConfig::defaults(Study::kDictCompare);
  cfg.n_grid = {50, 100, 400, 800};
  CHECK(cfg.table_n() == 400);
}

TEST_CASE("overrides") {
  const auto base = ExperimentConfig::defaults(Study::kRankSweep);
  SUBCASE("ranges") {
    const auto cfg = apply_overrides(base, "seeds=0..4,n_grid=50..800x2");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
    CHECK(cfg.n_grid == std::vector<int>{50, 100, 200, 400, 800});
  }
  SUBCASE("comma lists continue the previous value") {
    const auto cfg = apply_overrides(base, "ranks=4,6,sigma2=0.5");
    CHECK(cfg.ranks == std::vector<int>{4, 6});
    CHECK(cfg.sigma2 == 0.5);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(apply_overrides(base, "bogus=1"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(base, "d=abc"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(base, "ranks=5..2"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(base, "n_grid=50..800x1"), ConfigError);
    CHECK_THROWS_AS(apply_overrides(base, "study=dict_compare"), ConfigError);
  }
}

TEST_CASE("JSON round trip and hashing") {
  auto cfg = ExperimentConfig::defaults(Study::kEstimateRlct);
  cfg = apply_overrides(cfg, "d=5,p=7,ranks=1..5,seeds=3..6,tau2=2.5");
  const auto back = apply_json(ExperimentConfig::defaults(Study::kEstimateRlct), to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);

  auto moved = cfg;
  moved.output_dir = "elsewhere";
  CHECK(config_hash(moved) == config_hash(cfg));
  moved.tau2 = 2.0;
  CHECK(config_hash(moved) != config_hash(cfg));

  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"unknown", 1}}), ConfigError);
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"d", "six"}}), ConfigError);
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"study", "rank_sweep"}}), ConfigError);
  CHECK_THROWS_AS(parse_study("nope"), ConfigError);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "rankev_test_config";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  {
    std::ofstream f(path);
    f << R"({"study": "dict_compare", "p": 10, "seeds": [1, 2]})";
  }
  const auto cfg = load_config(path, std::nullopt);
  CHECK(cfg.study == Study::kDictCompare);
  CHECK(cfg.p == 10);
  CHECK(cfg.ranks == std::vector<int>{3});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS_AS(load_config(path, Study::kRankSweep), ConfigError);
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  CHECK_THROWS_AS(read_config_file(path), ConfigError);
  CHECK_THROWS_AS(read_config_file((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}
