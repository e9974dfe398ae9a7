#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "passval/csv.hpp"
#include "passval/pipeline.hpp"
#include "passval/valuation.hpp"

using namespace passval;
using namespace passval::pipeline;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path.string() : (path / child).string();
  }
};

RunConfig mini_config(const TempDir& dir) {
  RunConfig cfg;
  cfg.out_dir = dir.str("out");
  cfg.cache_dir = dir.str("cache");
  cfg.seed = 5;
  cfg.synth.seed = 5;
  cfg.synth.n_games = 12;
  cfg.synth.n_teams = 4;
  cfg.synth.half_seconds = 420;
  cfg.train_games = parse_game_set("1-6");
  cfg.validation_games = parse_game_set("7-9");
  cfg.test_games = parse_game_set("10-12");
  cfg.min_minutes = 90.0;  // three games per split at desk scale
  cfg.k = 5;
  cfg.sweep_ks = {1, 2, 5};
  return cfg;
}

}  // namespace

TEST_CASE("game set specs parse and re-serialize") {
  CHECK(parse_game_set("1-3,7") == std::set<std::int64_t>{1, 2, 3, 7});
  CHECK(parse_game_set("") == std::set<std::int64_t>{});
  CHECK(parse_game_set("5") == std::set<std::int64_t>{5});
  CHECK(game_set_to_string(parse_game_set("1-3,7,9-10")) == "1-3,7,9-10");
  CHECK_THROWS_AS(parse_game_set("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_game_set("abc"), ConfigError);
}

TEST_CASE("run configuration: files, overrides, and validation") {
  TempDir dir("passval_cfg_test");
  const std::string cfg_path = dir.str("run.cfg");
  {
    std::ofstream out(cfg_path);
    out << "# comment line\n"
        << "k=7\n"
        << "cell_length=5\n"
        << "cell_width=4\n"
        << "train_games=1-10\n"
        << "validation_games=11-12\n"
        << "no_cluster=true\n";
  }
  RunConfig cfg = RunConfig::from_file(cfg_path);
  CHECK(cfg.k == 7);
  CHECK(cfg.cell_length == 5.0);
  CHECK(cfg.no_cluster);
  CHECK(cfg.train_games.size() == 10);
  // no_cluster overrides the grid to a single cell.
  CHECK(cfg.grid().num_cells() == 1);
  cfg.no_cluster = false;
  CHECK(cfg.grid().cols() == 21);

  CHECK_THROWS_AS(cfg.set("unknown_key", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.set("k", "abc"), ConfigError);

  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.k = 7;
  cfg.test_games = parse_game_set("5");  // overlaps train
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("the full pipeline runs, composes, and is reproducible") {
  TempDir dir("passval_pipe_test");
  RunConfig cfg = mini_config(dir);

  cmd_synth(cfg);
  CHECK(fs::exists(dir.path / "out" / "events.csv"));
  CHECK(fs::exists(dir.path / "out" / "manifest_synth.json"));

  // Stages demand their inputs.
  CHECK_THROWS_AS(cmd_value(cfg), Error);

  cmd_ingest(cfg);
  CHECK(fs::exists(dir.path / "out" / "events_normalized.csv"));

  cmd_train_xg(cfg);
  CHECK(fs::exists(dir.path / "out" / "xg_model.txt"));

  cmd_build_index(cfg);
  const std::string cache = index_cache_path(cfg);
  CHECK(fs::exists(cache));

  cmd_value(cfg);
  const std::string values_first = slurp(dir.path / "out" / "pass_values.csv");
  CHECK(values_first.find("game_id") == 0);

  cmd_rate(cfg);
  const std::string ratings = slurp(dir.path / "out" / "ratings.csv");
  CHECK(ratings.find("player_id,player_name") == 0);
  CHECK(ratings.size() > 100);  // players actually rated

  cmd_predict(cfg);
  CHECK(fs::exists(dir.path / "out" / "forecasts.csv"));
  const std::string summary = slurp(dir.path / "out" / "forecast_summary.csv");
  CHECK(summary.find("k=5") != std::string::npos);
  CHECK(summary.find("Pass accuracy") != std::string::npos);
  CHECK(summary.find("Prior distribution") != std::string::npos);

  cmd_sweep_k(cfg);
  const std::string sweep = slurp(dir.path / "out" / "sweep_k.csv");
  CHECK(sweep.find("k=1") != std::string::npos);
  CHECK(sweep.find("k=2") != std::string::npos);

  // Re-running a downstream stage with unchanged upstreams reuses the cache
  // and reproduces identical bytes.
  cmd_build_index(cfg);
  cmd_value(cfg);
  CHECK(slurp(dir.path / "out" / "pass_values.csv") == values_first);

  // The similarity listing runs against the ratings file.
  const auto first_rated = [&] {
    auto table = csv::parse_table(ratings, "ratings");
    return *csv::to_int(table.rows.front().fields[0]);
  }();
  cmd_similar(cfg, first_rated, std::nullopt, 3);
  CHECK(fs::exists(dir.path / "out" / "similar.csv"));
}

TEST_CASE("value honors an explicit game set, and an empty one is fine") {
  TempDir dir("passval_value_games_test");
  RunConfig cfg = mini_config(dir);
  cmd_synth(cfg);
  cmd_train_xg(cfg);
  cmd_build_index(cfg);
  cfg.value_games = parse_game_set("7");
  cmd_value(cfg);
  const auto values =
      parse_pass_values_csv(slurp(dir.path / "out" / "pass_values.csv"), "t");
  REQUIRE(!values.empty());
  for (const auto& v : values) CHECK(v.game_id == 7);

  // Valuing a game with no events yields a header-only file, no error.
  cfg.value_games = parse_game_set("4000");
  cmd_value(cfg);
  CHECK(slurp(dir.path / "out" / "pass_values.csv") ==
        "game_id,sequence_id,pass_index,player_id,before,after,value\n");
}
