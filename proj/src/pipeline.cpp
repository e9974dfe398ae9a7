#include "passval/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "passval/csv.hpp"
#include "passval/hash.hpp"
#include "passval/outcome.hpp"
#include "passval/parallel.hpp"
#include "passval/possession.hpp"
#include "passval/similarity.hpp"
#include "passval/valuation.hpp"

namespace passval::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::set<std::int64_t> parse_game_set(std::string_view expr) {
  std::set<std::int64_t> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= expr.size(); ++i) {
    if (i != expr.size() && expr[i] != ',') continue;
    std::string_view item = expr.substr(start, i - start);
    start = i + 1;
    if (item.empty()) continue;
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) {
      auto v = csv::to_int(item);
      if (!v) throw ConfigError("bad game id: '" + std::string(item) + "'");
      out.insert(*v);
    } else {
      auto lo = csv::to_int(item.substr(0, dash));
      auto hi = csv::to_int(item.substr(dash + 1));
      if (!lo || !hi || *lo > *hi) {
        throw ConfigError("bad game range: '" + std::string(item) + "'");
      }
      for (std::int64_t g = *lo; g <= *hi; ++g) out.insert(g);
    }
  }
  return out;
}

std::string game_set_to_string(const std::set<std::int64_t>& games) {
  // Re-compress into ranges.
  std::string out;
  auto it = games.begin();
  while (it != games.end()) {
    std::int64_t lo = *it;
    std::int64_t hi = lo;
    ++it;
    while (it != games.end() && *it == hi + 1) {
      hi = *it;
      ++it;
    }
    if (!out.empty()) out += ',';
    out += std::to_string(lo);
    if (hi > lo) out += '-' + std::to_string(hi);
  }
  return out;
}

void RunConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(cell_length > 0.0) || !(cell_width > 0.0)) {
    throw ConfigError("grid cell sizes must be positive");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (min_minutes < 0.0) throw ConfigError("min_minutes must be >= 0");
  for (int kk : sweep_ks) {
    if (kk < 1) throw ConfigError("sweep k values must be >= 1");
  }
  auto overlaps = [](const std::set<std::int64_t>& a,
                     const std::set<std::int64_t>& b) {
    for (std::int64_t g : a) {
      if (b.contains(g)) return true;
    }
    return false;
  };
  if (overlaps(train_games, validation_games) ||
      overlaps(train_games, test_games) ||
      overlaps(validation_games, test_games)) {
    throw ConfigError("train/validation/test game sets must be disjoint");
  }
  synth.validate();
}

GridSpec RunConfig::grid() const {
  if (no_cluster) return GridSpec::no_clustering();
  return GridSpec{cell_length, cell_width};
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto as_int = [&](auto& target) {
    auto v = csv::to_int(value);
    if (!v) throw ConfigError("config: bad integer for " + key);
    target = static_cast<std::remove_reference_t<decltype(target)>>(*v);
  };
  auto as_double = [&](double& target) {
    auto v = csv::to_double(value);
    if (!v) throw ConfigError("config: bad number for " + key);
    target = *v;
  };
  auto as_bool = [&](bool& target) {
    if (value == "true" || value == "1") {
      target = true;
    } else if (value == "false" || value == "0") {
      target = false;
    } else {
      throw ConfigError("config: bad boolean for " + key);
    }
  };

  if (key == "events") events = value;
  else if (key == "lineups") lineups = value;
  else if (key == "players") players = value;
  else if (key == "fixtures") fixtures = value;
  else if (key == "taxonomy") taxonomy = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "cache_dir") cache_dir = value;
  else if (key == "cell_length") as_double(cell_length);
  else if (key == "cell_width") as_double(cell_width);
  else if (key == "k") as_int(k);
  else if (key == "min_minutes") as_double(min_minutes);
  else if (key == "seed") { as_int(seed); synth.seed = seed; }
  else if (key == "threads") as_int(threads);
  else if (key == "no_cluster") as_bool(no_cluster);
  else if (key == "strict_parse") as_bool(strict_parse);
  else if (key == "provider_normalized") as_bool(provider_normalized);
  else if (key == "dump_sequences") as_bool(dump_sequences);
  else if (key == "train_games") train_games = parse_game_set(value);
  else if (key == "validation_games") validation_games = parse_game_set(value);
  else if (key == "test_games") test_games = parse_game_set(value);
  else if (key == "value_games") value_games = parse_game_set(value);
  else if (key == "rate_games") rate_games = parse_game_set(value);
  else if (key == "sweep_ks") {
    sweep_ks.clear();
    for (std::int64_t v : parse_game_set(value)) {
      sweep_ks.push_back(static_cast<int>(v));
    }
  }
  else if (key == "synth_games") as_int(synth.n_games);
  else if (key == "synth_teams") as_int(synth.n_teams);
  else if (key == "synth_half_seconds") as_double(synth.half_seconds);
  else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    if (line[begin] == '#') continue;
    const std::size_t eq = line.find('=', begin);
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    std::string key = line.substr(begin, eq - begin);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::string value = line.substr(eq + 1);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    cfg.set(key, value);
  }
  return cfg;
}

std::string RunConfig::canonical_string() const {
  std::ostringstream os;
  os << "events=" << events << "\nlineups=" << lineups
     << "\nplayers=" << players << "\nfixtures=" << fixtures
     << "\ntaxonomy=" << taxonomy << "\ncell_length=" << csv::fmt(cell_length)
     << "\ncell_width=" << csv::fmt(cell_width) << "\nk=" << k
     << "\nmin_minutes=" << csv::fmt(min_minutes) << "\nseed=" << seed
     << "\nno_cluster=" << (no_cluster ? 1 : 0)
     << "\nprovider_normalized=" << (provider_normalized ? 1 : 0)
     << "\ntrain_games=" << game_set_to_string(train_games)
     << "\nvalidation_games=" << game_set_to_string(validation_games)
     << "\ntest_games=" << game_set_to_string(test_games)
     << "\nvalue_games=" << game_set_to_string(value_games)
     << "\nrate_games=" << game_set_to_string(rate_games) << "\nsynth_games="
     << synth.n_games << "\nsynth_teams=" << synth.n_teams
     << "\nsynth_half_seconds=" << csv::fmt(synth.half_seconds) << '\n';
  return os.str();
}

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string path_or(const std::string& configured, const std::string& fallback) {
  return configured.empty() ? fallback : configured;
}

struct Paths {
  std::string events, lineups, players, fixtures;
  std::string xg_model, pass_values, ratings, forecasts, summary, sweep;
  std::string normalized, sequences;
};

Paths resolve_paths(const RunConfig& cfg) {
  Paths p;
  p.events = path_or(cfg.events, join(cfg.out_dir, "events.csv"));
  p.lineups = path_or(cfg.lineups, join(cfg.out_dir, "lineups.csv"));
  p.players = path_or(cfg.players, join(cfg.out_dir, "players.csv"));
  p.fixtures = path_or(cfg.fixtures, join(cfg.out_dir, "fixtures.csv"));
  p.xg_model = join(cfg.out_dir, "xg_model.txt");
  p.pass_values = join(cfg.out_dir, "pass_values.csv");
  p.ratings = join(cfg.out_dir, "ratings.csv");
  p.forecasts = join(cfg.out_dir, "forecasts.csv");
  p.summary = join(cfg.out_dir, "forecast_summary.csv");
  p.sweep = join(cfg.out_dir, "sweep_k.csv");
  p.normalized = join(cfg.out_dir, "events_normalized.csv");
  p.sequences = join(cfg.out_dir, "sequences.csv");
  return p;
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

class Manifest {
 public:
  Manifest(const RunConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)) {
    doc_["command"] = command_;
    doc_["config_hash"] = hash_hex(cfg.canonical_string());
    doc_["k"] = cfg.k;
    doc_["grid"] = {{"cell_length", cfg.grid().cell_length},
                    {"cell_width", cfg.grid().cell_width},
                    {"cols", cfg.grid().cols()},
                    {"rows", cfg.grid().rows()}};
    doc_["seed"] = cfg.seed;
  }

  void input(const std::string& path) {
    doc_["inputs"][path] = hash_file_hex(path);
  }
  void output(const std::string& path) {
    doc_["outputs"][path] = hash_file_hex(path);
  }
  void timing(const std::string& label, double ms) {
    doc_["timings_ms"][label] = ms;
  }
  void counter(const std::string& name, double value) {
    doc_["counters"][name] = value;
  }

  void write() const {
    fs::create_directories(cfg_.out_dir);
    const std::string path =
        join(cfg_.out_dir, "manifest_" + command_ + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << doc_.dump(2) << '\n';
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  json doc_;
};

void write_text(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << content;
}

TaxonomyTable load_taxonomy(const RunConfig& cfg) {
  if (cfg.taxonomy.empty()) return TaxonomyTable::defaults();
  return TaxonomyTable::from_csv(cfg.taxonomy);
}

ParseOptions parse_options(const RunConfig& cfg,
                           const std::vector<Fixture>* fixtures) {
  ParseOptions opts;
  opts.strict = cfg.strict_parse;
  opts.provider_normalized = cfg.provider_normalized;
  opts.fixtures = fixtures;
  return opts;
}

EventStore load_events(const RunConfig& cfg, const Paths& paths,
                       std::vector<Fixture>* fixtures_storage) {
  const TaxonomyTable tax = load_taxonomy(cfg);
  if (!cfg.provider_normalized) {
    *fixtures_storage = read_fixtures(paths.fixtures);
    return parse_events(paths.events, tax, parse_options(cfg, fixtures_storage));
  }
  return parse_events(paths.events, tax, parse_options(cfg, nullptr));
}

// Segment, label against the xg model, and enumerate the subsequences of the
// selected games in deterministic order.
std::vector<Subsequence> training_subsequences(
    const EventStore& store, const std::set<std::int64_t>& games,
    const XgModel& model) {
  std::vector<Subsequence> subs;
  for (std::int64_t game : games) {
    auto events = store.game(game);
    if (events.empty()) continue;
    auto seqs = segment_possessions(events);
    label_sequences(seqs, model);
    for (const auto& seq : seqs) {
      for (auto& sub : enumerate_subsequences(seq)) {
        subs.push_back(std::move(sub));
      }
    }
  }
  return subs;
}

std::set<std::int64_t> default_value_games(const RunConfig& cfg) {
  if (!cfg.value_games.empty()) return cfg.value_games;
  std::set<std::int64_t> games = cfg.validation_games;
  games.insert(cfg.test_games.begin(), cfg.test_games.end());
  return games;
}

std::set<std::int64_t> default_rate_games(
    const RunConfig& cfg, std::span<const PassValue> values) {
  if (!cfg.rate_games.empty()) return cfg.rate_games;
  if (!cfg.validation_games.empty()) return cfg.validation_games;
  std::set<std::int64_t> games;
  for (const auto& v : values) games.insert(v.game_id);
  return games;
}

// Success flags and team ids are not part of the pass-values file format;
// they are re-derived from the event stream when rating.
void annotate_pass_values(std::vector<PassValue>& values,
                          const EventStore& store) {
  std::set<std::int64_t> games;
  for (const auto& v : values) games.insert(v.game_id);
  std::map<std::pair<std::int64_t, int>, std::pair<bool, std::int64_t>> info;
  for (std::int64_t game : games) {
    auto events = store.game(game);
    if (events.empty()) continue;
    for (const auto& seq : segment_possessions(events)) {
      int pass_ordinal = 0;
      for (std::size_t i = 0; i < seq.events.size(); ++i) {
        if (!seq.events[i].is_pass()) continue;
        info[{seq.sequence_id, pass_ordinal}] = {pass_success(seq, i),
                                                 seq.team_id};
        ++pass_ordinal;
      }
    }
  }
  for (auto& v : values) {
    auto it = info.find({v.sequence_id, v.pass_index});
    if (it == info.end()) {
      throw ValidationError("pass value does not match the event stream: seq " +
                            std::to_string(v.sequence_id));
    }
    v.successful = it->second.first;
    v.team_id = it->second.second;
  }
}

std::string summary_to_csv(std::vector<std::pair<std::string, double>> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  std::ostringstream os;
  os << "setting,log_loss\n";
  for (const auto& [name, loss] : rows) {
    os << name << ',' << csv::fmt(loss) << '\n';
  }
  return os.str();
}

struct PredictInputs {
  std::vector<Fixture> test;
  std::vector<Lineup> lineups;
  GoalStats target;
};

PredictInputs predict_inputs(const RunConfig& cfg, const Paths& paths) {
  PredictInputs in;
  auto fixtures = read_fixtures(paths.fixtures);
  in.lineups = read_lineups(paths.lineups);
  std::vector<Fixture> calibration;
  for (const auto& f : fixtures) {
    if (cfg.test_games.contains(f.game_id)) in.test.push_back(f);
    if (cfg.validation_games.contains(f.game_id)) calibration.push_back(f);
  }
  if (calibration.empty()) {
    throw ConfigError("predict: no validation games to calibrate against");
  }
  if (in.test.empty()) {
    throw ConfigError("predict: no test games to forecast");
  }
  in.target = goal_stats(calibration);
  return in;
}

double prior_log_loss(const ForecastReport& reference) {
  std::vector<OutcomeForecast> forecasts(reference.rows.size(),
                                         baseline_prior());
  std::vector<MatchOutcome> observed;
  observed.reserve(reference.rows.size());
  for (const auto& row : reference.rows) observed.push_back(row.observed);
  return log_loss(forecasts, observed);
}

}  // namespace

std::string index_cache_path(const RunConfig& cfg) {
  const Paths paths = resolve_paths(cfg);
  Fnv1a hash;
  hash.update_file(paths.events);
  hash.update(load_taxonomy(cfg).to_csv());
  hash.update_file(paths.xg_model);
  hash.update(game_set_to_string(cfg.train_games));
  hash.update(csv::fmt(cfg.grid().cell_length));
  hash.update(csv::fmt(cfg.grid().cell_width));
  return join(cfg.cache_dir, "index_" + hash.hex() + ".bin");
}

void cmd_synth(const RunConfig& cfg) {
  cfg.validate();
  Manifest manifest(cfg, "synth");
  Stopwatch watch;
  const synth::SynthData data = synth::generate(cfg.synth);
  synth::write_files(data, cfg.out_dir);
  manifest.timing("generate", watch.ms());
  for (const char* name :
       {"events.csv", "lineups.csv", "players.csv", "fixtures.csv", "truth.csv"}) {
    manifest.output(join(cfg.out_dir, name));
  }
  manifest.counter("games", cfg.synth.n_games);
  manifest.write();
}

void cmd_ingest(const RunConfig& cfg) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);
  Manifest manifest(cfg, "ingest");
  Stopwatch watch;
  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  manifest.timing("parse", watch.ms());
  manifest.input(paths.events);
  write_text(paths.normalized, events_to_csv(store));
  manifest.output(paths.normalized);
  manifest.counter("events", static_cast<double>(store.events().size()));
  manifest.counter("games", static_cast<double>(store.game_ids().size()));
  manifest.counter("skipped_rows", static_cast<double>(store.skipped().size()));
  manifest.write();
  if (!store.skipped().empty()) {
    std::cerr << "ingest: skipped " << store.skipped().size()
              << " malformed rows\n";
  }
}

void cmd_train_xg(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.train_games.empty()) {
    throw ConfigError("train-xg: train_games is empty");
  }
  const Paths paths = resolve_paths(cfg);
  Manifest manifest(cfg, "train_xg");
  manifest.input(paths.events);
  Stopwatch total;
  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  std::vector<Event> shots;
  for (std::int64_t game : cfg.train_games) {
    for (const Event& e : store.game(game)) {
      if (e.is_shot()) shots.push_back(e);
    }
  }
  Stopwatch fit;
  const XgModel model = train_xg(shots);
  manifest.timing("fit", fit.ms());
  save_xg(paths.xg_model, model);
  manifest.timing("total", total.ms());
  manifest.output(paths.xg_model);
  manifest.counter("shots", static_cast<double>(shots.size()));
  manifest.counter("base_rate", model.base_rate);
  manifest.counter("penalty_rate", model.penalty_rate);
  manifest.write();
}

void cmd_build_index(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.train_games.empty()) {
    throw ConfigError("build-index: train_games is empty");
  }
  const Paths paths = resolve_paths(cfg);
  Manifest manifest(cfg, "build_index");
  manifest.input(paths.events);
  manifest.input(paths.xg_model);
  const std::string cache = index_cache_path(cfg);
  Stopwatch total;
  if (fs::exists(cache)) {
    const ClusterIndex index = load_index(cache);  // validates
    manifest.timing("load_cached", total.ms());
    manifest.counter("cache_hit", 1);
    manifest.counter("entries", static_cast<double>(index.size()));
    manifest.counter("occupied_clusters",
                     static_cast<double>(index.occupied_clusters()));
    manifest.counter("mean_cluster_size", index.mean_cluster_size());
    manifest.output(cache);
    manifest.write();
    return;
  }
  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  const XgModel model = load_xg(paths.xg_model);
  Stopwatch build;
  const auto subs = training_subsequences(store, cfg.train_games, model);
  const ClusterIndex index = build_index(subs, cfg.grid(), cfg.threads);
  manifest.timing("build", build.ms());
  fs::create_directories(cfg.cache_dir);
  save_index(cache, index);
  manifest.timing("total", total.ms());
  manifest.counter("cache_hit", 0);
  manifest.counter("entries", static_cast<double>(index.size()));
  manifest.counter("occupied_clusters",
                   static_cast<double>(index.occupied_clusters()));
  manifest.counter("mean_cluster_size", index.mean_cluster_size());
  manifest.output(cache);
  manifest.write();
}

void cmd_value(const RunConfig& cfg) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);
  const std::string cache = index_cache_path(cfg);
  if (!fs::exists(cache)) {
    throw ConfigError("value: index cache missing, run build-index first");
  }
  Manifest manifest(cfg, "value");
  manifest.input(paths.events);
  manifest.input(cache);
  Stopwatch total;
  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  const ClusterIndex index = load_index(cache);
  const XgModel model = load_xg(paths.xg_model);

  const std::set<std::int64_t> game_set = default_value_games(cfg);
  const std::vector<std::int64_t> games(game_set.begin(), game_set.end());
  std::vector<std::vector<PassValue>> per_game(games.size());
  std::vector<std::vector<PossessionSequence>> per_game_seqs(games.size());
  Stopwatch value_watch;
  parallel_for(games.size(), cfg.threads, [&](std::size_t i) {
    auto events = store.game(games[i]);
    if (events.empty()) return;
    auto seqs = segment_possessions(events);
    label_sequences(seqs, model);
    per_game[i] = value_game(index, seqs, cfg.k);
    if (cfg.dump_sequences) per_game_seqs[i] = std::move(seqs);
  });
  manifest.timing("value", value_watch.ms());

  std::vector<PassValue> values;
  for (auto& chunk : per_game) {
    values.insert(values.end(), chunk.begin(), chunk.end());
  }
  write_text(paths.pass_values, pass_values_to_csv(values));
  manifest.output(paths.pass_values);
  if (cfg.dump_sequences) {
    std::vector<PossessionSequence> all;
    for (auto& chunk : per_game_seqs) {
      all.insert(all.end(), std::make_move_iterator(chunk.begin()),
                 std::make_move_iterator(chunk.end()));
    }
    write_text(paths.sequences, sequences_to_csv(all));
    manifest.output(paths.sequences);
  }
  manifest.timing("total", total.ms());
  manifest.counter("pass_values", static_cast<double>(values.size()));
  manifest.counter("games", static_cast<double>(games.size()));
  manifest.write();
}

void cmd_rate(const RunConfig& cfg) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);
  Manifest manifest(cfg, "rate");
  manifest.input(paths.pass_values);
  manifest.input(paths.lineups);
  Stopwatch total;

  std::ifstream in(paths.pass_values, std::ios::binary);
  if (!in) throw IoError("cannot open: " + paths.pass_values);
  std::ostringstream buf;
  buf << in.rdbuf();
  auto values = parse_pass_values_csv(buf.str(), paths.pass_values);

  const std::set<std::int64_t> games = default_rate_games(cfg, values);
  std::erase_if(values,
                [&](const PassValue& v) { return !games.contains(v.game_id); });

  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  annotate_pass_values(values, store);

  const auto lineups = read_lineups(paths.lineups);
  const auto ratings = rate_players(values, lineups, games, cfg.min_minutes);

  std::map<std::int64_t, PlayerInfo> players;
  if (fs::exists(paths.players)) players = read_players(paths.players);
  write_text(paths.ratings, ratings_to_csv(ratings, players));
  manifest.timing("total", total.ms());
  manifest.output(paths.ratings);
  manifest.counter("rated_players", static_cast<double>(ratings.size()));
  manifest.counter("pass_values", static_cast<double>(values.size()));
  manifest.write();
}

void cmd_predict(const RunConfig& cfg) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);
  Manifest manifest(cfg, "predict");
  manifest.input(paths.ratings);
  manifest.input(paths.fixtures);
  manifest.input(paths.lineups);
  Stopwatch total;

  std::ifstream in(paths.ratings, std::ios::binary);
  if (!in) throw IoError("cannot open: " + paths.ratings);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto ratings = parse_ratings_csv(buf.str(), paths.ratings);

  const PredictInputs inputs = predict_inputs(cfg, paths);

  const auto report = forecast_games(
      inputs.test, inputs.lineups,
      strength_inputs(ratings, StrengthMetric::ContributionP90), inputs.target);
  const auto accuracy_report = forecast_games(
      inputs.test, inputs.lineups,
      strength_inputs(ratings, StrengthMetric::PassAccuracy), inputs.target);

  write_text(paths.forecasts, forecast_report_to_csv(report));
  std::vector<std::pair<std::string, double>> summary;
  summary.push_back({"k=" + std::to_string(cfg.k), report.log_loss});
  summary.push_back({"Pass accuracy", accuracy_report.log_loss});
  summary.push_back({"Prior distribution", prior_log_loss(report)});
  write_text(paths.summary, summary_to_csv(summary));

  manifest.timing("total", total.ms());
  manifest.output(paths.forecasts);
  manifest.output(paths.summary);
  manifest.counter("forecast_games", static_cast<double>(report.rows.size()));
  manifest.counter("excluded_games", static_cast<double>(report.excluded_games));
  manifest.counter("log_loss", report.log_loss);
  manifest.write();
}

void cmd_similar(const RunConfig& cfg, std::int64_t target,
                 const std::optional<std::string>& born_after, int top_n) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);

  std::ifstream in(paths.ratings, std::ios::binary);
  if (!in) throw IoError("cannot open: " + paths.ratings);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto ratings = parse_ratings_csv(buf.str(), paths.ratings);

  std::map<std::int64_t, PlayerInfo> players;
  if (fs::exists(paths.players)) players = read_players(paths.players);

  SimilarityFilters filters;
  filters.born_after = born_after;
  filters.min_minutes = cfg.min_minutes;
  const auto similar = similar_players(target, ratings, players, filters, top_n);

  std::ostringstream os;
  os << "rank,player_id,player_name,team,similarity\n";
  int rank = 1;
  for (const auto& s : similar) {
    auto it = players.find(s.player_id);
    const std::string name = it != players.end()
                                 ? it->second.name
                                 : "player_" + std::to_string(s.player_id);
    std::int64_t team = it != players.end() ? it->second.team_id : 0;
    os << rank++ << ',' << s.player_id << ',' << name << ',' << team << ','
       << csv::fmt(s.score) << '\n';
  }
  const std::string out_path = join(cfg.out_dir, "similar.csv");
  write_text(out_path, os.str());
  std::cout << os.str();

  Manifest manifest(cfg, "similar");
  manifest.input(paths.ratings);
  manifest.output(out_path);
  manifest.counter("candidates", static_cast<double>(similar.size()));
  manifest.write();
}

void cmd_sweep_k(const RunConfig& cfg) {
  cfg.validate();
  const Paths paths = resolve_paths(cfg);
  const std::string cache = index_cache_path(cfg);
  if (!fs::exists(cache)) {
    throw ConfigError("sweep-k: index cache missing, run build-index first");
  }
  Manifest manifest(cfg, "sweep_k");
  manifest.input(paths.events);
  manifest.input(cache);
  Stopwatch total;

  std::vector<Fixture> fixtures_storage;
  const EventStore store = load_events(cfg, paths, &fixtures_storage);
  const ClusterIndex index = load_index(cache);
  const XgModel model = load_xg(paths.xg_model);
  const auto lineups = read_lineups(paths.lineups);
  const PredictInputs inputs = predict_inputs(cfg, paths);

  const std::set<std::int64_t> rate_set =
      cfg.rate_games.empty() ? cfg.validation_games : cfg.rate_games;
  if (rate_set.empty()) {
    throw ConfigError("sweep-k: no games to rate (set validation_games)");
  }

  // One distance pass per subsequence serves every k.
  const std::vector<std::int64_t> games(rate_set.begin(), rate_set.end());
  const std::vector<int>& ks = cfg.sweep_ks;
  std::vector<std::vector<std::vector<PassValue>>> per_game(games.size());
  Stopwatch value_watch;
  parallel_for(games.size(), cfg.threads, [&](std::size_t gi) {
    auto events = store.game(games[gi]);
    if (events.empty()) return;
    auto seqs = segment_possessions(events);
    label_sequences(seqs, model);
    auto& by_k = per_game[gi];
    by_k.assign(ks.size(), {});
    for (const auto& seq : seqs) {
      const auto subs = enumerate_subsequences(seq);
      if (subs.empty()) continue;
      std::vector<std::vector<double>> rewards(subs.size());
      QueryOptions opts;
      for (std::size_t j = 0; j < subs.size(); ++j) {
        rewards[j] = expected_reward_multi(index, interpolate(subs[j]),
                                           cluster_key(index.grid(), subs[j]),
                                           ks, opts);
      }
      std::vector<std::size_t> pass_positions;
      for (std::size_t i = 0; i < seq.events.size(); ++i) {
        if (seq.events[i].is_pass()) pass_positions.push_back(i);
      }
      for (std::size_t j = 0; j < subs.size(); ++j) {
        const bool successful = pass_success(seq, pass_positions[j]);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
          PassValue pv;
          pv.game_id = seq.game_id;
          pv.sequence_id = seq.sequence_id;
          pv.pass_index = subs[j].pass_index;
          pv.player_id = subs[j].events.back().player_id;
          pv.team_id = subs[j].events.back().team_id;
          pv.successful = successful;
          pv.before = j == 0 ? 0.0 : rewards[j - 1][ki];
          pv.after = successful ? rewards[j][ki] : 0.0;
          pv.value = pv.after - pv.before;
          by_k[ki].push_back(pv);
        }
      }
    }
  });
  manifest.timing("value_all_k", value_watch.ms());

  std::vector<std::pair<std::string, double>> summary;
  double accuracy_loss = 0.0;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    std::vector<PassValue> values;
    for (const auto& by_k : per_game) {
      if (by_k.size() != ks.size()) continue;
      values.insert(values.end(), by_k[ki].begin(), by_k[ki].end());
    }
    const auto ratings = rate_players(values, lineups, rate_set, cfg.min_minutes);
    const auto report = forecast_games(
        inputs.test, inputs.lineups,
        strength_inputs(ratings, StrengthMetric::ContributionP90),
        inputs.target);
    summary.push_back({"k=" + std::to_string(ks[ki]), report.log_loss});
    if (ki == 0) {
      // Pass accuracy ignores k entirely; one evaluation covers it.
      const auto acc_report = forecast_games(
          inputs.test, inputs.lineups,
          strength_inputs(ratings, StrengthMetric::PassAccuracy),
          inputs.target);
      accuracy_loss = acc_report.log_loss;
      summary.push_back({"Prior distribution", prior_log_loss(report)});
    }
  }
  summary.push_back({"Pass accuracy", accuracy_loss});

  write_text(paths.sweep, summary_to_csv(summary));
  manifest.timing("total", total.ms());
  manifest.output(paths.sweep);
  manifest.write();
  std::ifstream sweep_in(paths.sweep);
  std::cout << sweep_in.rdbuf();
}

}  // namespace passval::pipeline
