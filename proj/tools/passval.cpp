// passval: values passes in football event data by the expected-scoreline
// impact of their possession sequences (k-NN over DTW distances), rates
// players, and validates the ratings by forecasting match outcomes.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "passval/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::string> cache_dir;
  std::optional<unsigned> threads;
  std::optional<int> k;
  std::optional<std::string> cell;  // "15x17"
  std::optional<double> min_minutes;
  std::optional<std::uint64_t> seed;
  bool no_cluster = false;
  bool dump_sequences = false;
  std::optional<std::string> games;  // value/rate game-set override
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "run configuration file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--cache", flags.cache_dir, "cache directory");
  cmd->add_option("--threads", flags.threads, "worker thread count");
  cmd->add_option("--k", flags.k, "number of nearest neighbors");
  cmd->add_option("--cell", flags.cell, "grid cell size, e.g. 15x17");
  cmd->add_option("--min-minutes", flags.min_minutes,
                  "minimum minutes for a player rating");
  cmd->add_option("--seed", flags.seed, "generator seed");
  cmd->add_flag("--no-cluster", flags.no_cluster,
                "exhaustive search: one cluster for the whole pitch");
  cmd->add_flag("--dump-sequences", flags.dump_sequences,
                "also write the possession sequence table");
  cmd->add_option("--games", flags.games,
                  "game set override, e.g. 1-120,150");
}

passval::pipeline::RunConfig make_config(const CommonFlags& flags,
                                         bool games_are_value_set) {
  using passval::pipeline::RunConfig;
  RunConfig cfg = flags.config.empty() ? RunConfig{}
                                       : RunConfig::from_file(flags.config);
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  if (flags.cache_dir) cfg.cache_dir = *flags.cache_dir;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.k) cfg.k = *flags.k;
  if (flags.min_minutes) cfg.min_minutes = *flags.min_minutes;
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.synth.seed = *flags.seed;
  }
  if (flags.no_cluster) cfg.no_cluster = true;
  if (flags.dump_sequences) cfg.dump_sequences = true;
  if (flags.cell) {
    const auto x = flags.cell->find('x');
    if (x == std::string::npos) {
      throw passval::ConfigError("--cell expects LENGTHxWIDTH, e.g. 15x17");
    }
    cfg.set("cell_length", flags.cell->substr(0, x));
    cfg.set("cell_width", flags.cell->substr(x + 1));
  }
  if (flags.games) {
    cfg.set(games_are_value_set ? "value_games" : "rate_games", *flags.games);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pass valuation, player rating, and match-outcome evaluation for "
      "football event data"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::int64_t similar_target = 0;
  std::string born_after;
  int top_n = 5;
  std::optional<int> synth_games;
  std::optional<int> synth_teams;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth, flags);
  synth->add_option("--games-count", synth_games, "number of games");
  synth->add_option("--teams", synth_teams, "number of teams");

  auto* ingest =
      app.add_subcommand("ingest", "parse, validate, and normalize events");
  add_common(ingest, flags);

  auto* train = app.add_subcommand("train-xg", "fit the expected-goals model");
  add_common(train, flags);

  auto* build =
      app.add_subcommand("build-index", "build the clustered k-NN index");
  add_common(build, flags);

  auto* value = app.add_subcommand("value", "value every pass");
  add_common(value, flags);

  auto* rate = app.add_subcommand("rate", "aggregate pass values into ratings");
  add_common(rate, flags);

  auto* predict =
      app.add_subcommand("predict", "forecast test-game outcomes from ratings");
  add_common(predict, flags);

  auto* similar = app.add_subcommand("similar", "rank players similar to a target");
  add_common(similar, flags);
  similar->add_option("--target", similar_target, "target player id")
      ->required();
  similar->add_option("--born-after", born_after,
                      "only candidates born after this ISO date");
  similar->add_option("--top", top_n, "number of results");

  auto* sweep =
      app.add_subcommand("sweep-k", "log-loss table across neighbor counts");
  add_common(sweep, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace passval::pipeline;
    if (synth->parsed()) {
      RunConfig cfg = make_config(flags, true);
      if (synth_games) cfg.synth.n_games = *synth_games;
      if (synth_teams) cfg.synth.n_teams = *synth_teams;
      cmd_synth(cfg);
    } else if (ingest->parsed()) {
      cmd_ingest(make_config(flags, true));
    } else if (train->parsed()) {
      cmd_train_xg(make_config(flags, true));
    } else if (build->parsed()) {
      cmd_build_index(make_config(flags, true));
    } else if (value->parsed()) {
      cmd_value(make_config(flags, true));
    } else if (rate->parsed()) {
      cmd_rate(make_config(flags, false));
    } else if (predict->parsed()) {
      cmd_predict(make_config(flags, true));
    } else if (similar->parsed()) {
      cmd_similar(make_config(flags, true), similar_target,
                  born_after.empty() ? std::nullopt
                                     : std::optional<std::string>(born_after),
                  top_n);
    } else if (sweep->parsed()) {
      cmd_sweep_k(make_config(flags, true));
    }
  } catch (const passval::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
