#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "passval/knn_index.hpp"
#include "passval/synth.hpp"

namespace passval::pipeline {

// Flat key=value run configuration; CLI flags override file values.
struct RunConfig {
  std::string events;
  std::string lineups;
  std::string players;
  std::string fixtures;
  std::string taxonomy;  // empty: built-in defaults
  std::string out_dir = "out";
  std::string cache_dir = "cache";

  double cell_length = 15.0;
  double cell_width = 17.0;
  int k = 10;
  double min_minutes = 900.0;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  bool no_cluster = false;
  bool strict_parse = false;
  bool provider_normalized = true;
  bool dump_sequences = false;

  std::set<std::int64_t> train_games;
  std::set<std::int64_t> validation_games;
  std::set<std::int64_t> test_games;
  // Game sets actually valued / rated; empty means the natural default
  // (validation + test for value, validation for rate).
  std::set<std::int64_t> value_games;
  std::set<std::int64_t> rate_games;

  std::vector<int> sweep_ks = {1, 2, 5, 10, 20, 50, 100};

  synth::SynthConfig synth;

  void validate() const;  // throws ConfigError
  GridSpec grid() const;

  // Throws ConfigError on unknown keys or unparseable values.
  void set(const std::string& key, const std::string& value);
  static RunConfig from_file(const std::string& path);

  std::string canonical_string() const;  // stable serialization for hashing
};

std::set<std::int64_t> parse_game_set(std::string_view expr);  // "1-120,300"
std::string game_set_to_string(const std::set<std::int64_t>& games);

// Stage entry points. Each writes its outputs plus a JSON run manifest
// (config hash, input/output hashes, timings) into out_dir.
void cmd_synth(const RunConfig& cfg);
void cmd_ingest(const RunConfig& cfg);
void cmd_train_xg(const RunConfig& cfg);
void cmd_build_index(const RunConfig& cfg);
void cmd_value(const RunConfig& cfg);
void cmd_rate(const RunConfig& cfg);
void cmd_predict(const RunConfig& cfg);
void cmd_similar(const RunConfig& cfg, std::int64_t target,
                 const std::optional<std::string>& born_after, int top_n);
void cmd_sweep_k(const RunConfig& cfg);

// Path of the on-disk index cache for this configuration; the key hashes the
// training inputs, so an unchanged upstream reuses the same file.
std::string index_cache_path(const RunConfig& cfg);

}  // namespace passval::pipeline
