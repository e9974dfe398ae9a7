#include <doctest.h>

#include <map>

#include "passval/possession.hpp"
#include "passval/synth.hpp"

using namespace passval;

namespace {

synth::SynthConfig small_config(int games = 6, std::uint64_t seed = 42) {
  synth::SynthConfig cfg;
  cfg.seed = seed;
  cfg.n_games = games;
  cfg.n_teams = 4;
  cfg.half_seconds = 500;
  return cfg;
}

}  // namespace

TEST_CASE("generation is byte-identical per seed") {
  const auto a = synth::generate(small_config());
  const auto b = synth::generate(small_config());
  CHECK(a.events_csv == b.events_csv);
  CHECK(a.lineups_csv == b.lineups_csv);
  CHECK(a.players_csv == b.players_csv);
  CHECK(a.fixtures_csv == b.fixtures_csv);
  CHECK(a.truth_csv == b.truth_csv);

  const auto c = synth::generate(small_config(6, 43));
  CHECK(a.events_csv != c.events_csv);
}

TEST_CASE("zero games produce headers only") {
  const auto data = synth::generate(small_config(0));
  CHECK(data.events_csv ==
        "game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y\n");
  CHECK(data.fixtures_csv == "game_id,home_team,away_team,home_goals,away_goals,date\n");
  auto store = parse_events_text(data.events_csv, TaxonomyTable::defaults());
  CHECK(store.events().empty());
}

TEST_CASE("invalid configurations are rejected") {
  auto cfg = small_config();
  cfg.n_teams = 1;
  CHECK_THROWS_AS(synth::generate(cfg), ConfigError);
  cfg = small_config();
  cfg.foul_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.min_gap = 3.0;
  cfg.max_gap = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_games = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generated events parse cleanly and respect all invariants") {
  const auto data = synth::generate(small_config(8));
  ParseOptions strict;
  strict.strict = true;  // a single malformed row would throw
  const auto store =
      parse_events_text(data.events_csv, TaxonomyTable::defaults(), strict);
  CHECK(store.skipped().empty());
  CHECK(store.game_ids().size() == 8);
  CHECK(!store.events().empty());

  const auto lineups = parse_lineups_text(data.lineups_csv);
  std::map<std::pair<std::int64_t, std::int64_t>, int> starters;
  for (const auto& l : lineups) {
    if (l.minute_on == 0.0) starters[{l.game_id, l.team_id}] += 1;
  }
  for (const auto& [key, n] : starters) CHECK(n == 11);

  // Fixture scores match the goal events.
  const auto fixtures = parse_fixtures_text(data.fixtures_csv);
  REQUIRE(fixtures.size() == 8);
  for (const auto& f : fixtures) {
    int home = 0, away = 0;
    for (const Event& e : store.game(f.game_id)) {
      if (!e.is_goal()) continue;
      if (e.team_id == f.home_team) ++home;
      if (e.team_id == f.away_team) ++away;
    }
    CHECK(f.home_goals == home);
    CHECK(f.away_goals == away);
  }
}

TEST_CASE("the action mix lands near the documented proportions") {
  auto cfg = small_config(60, 7);
  cfg.n_teams = 6;
  cfg.half_seconds = 700;
  const auto data = synth::generate(cfg);
  const auto store = parse_events_text(data.events_csv, TaxonomyTable::defaults());

  std::map<int, std::size_t> by_type;
  for (const auto& e : store.events()) by_type[e.provider_type] += 1;
  const double actions = static_cast<double>(by_type[8] + by_type[1] +
                                             by_type[3] + by_type[10]);
  const double pass_share = static_cast<double>(by_type[8]) / actions;
  const double dribble_share = static_cast<double>(by_type[1]) / actions;
  const double set_piece_share = static_cast<double>(by_type[3]) / actions;
  const double shot_share = static_cast<double>(by_type[10]) / actions;

  CHECK(pass_share > 0.70);
  CHECK(pass_share < 0.80);
  CHECK(dribble_share > 0.08);
  CHECK(dribble_share < 0.18);
  CHECK(set_piece_share > 0.05);
  CHECK(set_piece_share < 0.15);
  CHECK(shot_share >= 0.01);
  CHECK(shot_share <= 0.07);
}

TEST_CASE("every game segments into consistent possession sequences") {
  const auto data = synth::generate(small_config(4, 9));
  const auto store = parse_events_text(data.events_csv, TaxonomyTable::defaults());
  for (std::int64_t game : store.game_ids()) {
    const auto events = store.game(game);
    const auto seqs = segment_possessions(events);
    std::size_t total = 0;
    for (const auto& s : seqs) {
      REQUIRE(!s.events.empty());
      total += s.events.size();
      for (const auto& e : s.events) CHECK(e.team_id == s.team_id);
    }
    CHECK(total == events.size());
  }
}

TEST_CASE("the planted scoring model is monotone along the center line") {
  double prev = 1.0;
  for (double dist = 1; dist <= 60; dist += 1) {
    const double xg = synth::true_xg({105.0 - dist, 34.0});
    CHECK(xg < prev);
    CHECK(xg > 0.0);
    CHECK(xg < 1.0);
    prev = xg;
  }
}

TEST_CASE("sampled shots are reproducible and mixed-class") {
  const auto a = synth::sample_labeled_shots(500, 3);
  const auto b = synth::sample_labeled_shots(500, 3);
  REQUIRE(a.size() == 500);
  std::size_t goals = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].features.dist == b[i].features.dist);
    CHECK(a[i].goal == b[i].goal);
    goals += a[i].goal ? 1 : 0;
  }
  CHECK(goals > 10);
  CHECK(goals < 490);
}
