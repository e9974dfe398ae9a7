#include <doctest.h>

#include <cmath>
#include <sstream>

#include "passval/csv.hpp"
#include "passval/events.hpp"
#include "passval/rng.hpp"

using namespace passval;

namespace {

const char* kHeader =
    "game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y\n";

EventStore parse(const std::string& body, ParseOptions opts = {}) {
  return parse_events_text(std::string(kHeader) + body,
                           TaxonomyTable::defaults(), opts, "test");
}

}  // namespace

TEST_CASE("to_pitch_meters maps corners and interior points") {
  CHECK(to_pitch_meters(0, 0) == PitchPoint{0, 0});
  CHECK(to_pitch_meters(100, 100) == PitchPoint{105, 68});
  auto p = to_pitch_meters(58, 34);
  CHECK(p.x == doctest::Approx(60.9).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(23.12).epsilon(1e-12));
  CHECK_THROWS_AS(to_pitch_meters(120, 50), ValidationError);
  CHECK_THROWS_AS(to_pitch_meters(50, -1), ValidationError);
}

TEST_CASE("to_pitch_meters is monotone in each coordinate") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0, 100);
    const double b = rng.uniform(0, 100);
    const double y = rng.uniform(0, 100);
    const auto pa = to_pitch_meters(std::min(a, b), y);
    const auto pb = to_pitch_meters(std::max(a, b), y);
    CHECK(pa.x <= pb.x);
    const auto qa = to_pitch_meters(y, std::min(a, b));
    const auto qb = to_pitch_meters(y, std::max(a, b));
    CHECK(qa.y <= qb.y);
  }
}

TEST_CASE("a provider pass row parses to a metric pass event") {
  auto store = parse("7,1,8.642,679,217031,8,85,58,66,34,9\n");
  REQUIRE(store.events().size() == 1);
  const Event& e = store.events()[0];
  CHECK(e.game_id == 7);
  CHECK(e.kind == EventKind::Pass);
  CHECK(e.subkind == EventSubkind::OpenPlay);
  CHECK(e.start.x == doctest::Approx(60.9).epsilon(1e-12));
  CHECK(e.start.y == doctest::Approx(23.12).epsilon(1e-12));
  CHECK(e.end.x == doctest::Approx(69.3).epsilon(1e-12));
  CHECK(e.end.y == doctest::Approx(6.12).epsilon(1e-12));
}

TEST_CASE("empty stream parses to no events") {
  auto store = parse("");
  CHECK(store.events().empty());
  CHECK(store.skipped().empty());
  CHECK(store.game(1).empty());
}

TEST_CASE("out-of-range coordinates are skipped, or abort in strict mode") {
  auto store = parse("1,1,3,679,1,8,85,120,50,50,50\n1,1,4,679,1,8,85,50,55,50,50\n");
  CHECK(store.events().size() == 1);
  REQUIRE(store.skipped().size() == 1);
  CHECK(store.skipped()[0].line_no == 2);

  ParseOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(parse("1,1,3,679,1,8,85,120,50,50,50\n", strict),
                  ValidationError);
}

TEST_CASE("malformed rows report their line numbers") {
  auto store = parse("1,1,3,679,1,8,85,50,55,50\n1,x,3,679,1,8,85,50,55,50,50\n");
  CHECK(store.events().empty());
  REQUIRE(store.skipped().size() == 2);
  CHECK(store.skipped()[0].message.find("fields") != std::string::npos);
}

TEST_CASE("unknown provider codes map to Other") {
  auto store = parse("1,1,3,679,1,99,999,50,55,50,50\n");
  REQUIRE(store.events().size() == 1);
  CHECK(store.events()[0].kind == EventKind::Other);
}

TEST_CASE("events sort by (half, time) with stable ingestion ties") {
  auto store = parse(
      "1,2,5,679,1,8,85,50,55,50,50\n"
      "1,1,9,679,2,8,85,50,55,50,50\n"
      "1,1,4,679,3,8,85,50,55,50,50\n"
      "1,1,4,679,4,8,85,50,55,50,50\n");
  auto game = store.game(1);
  REQUIRE(game.size() == 4);
  CHECK(game[0].player_id == 3);  // first of the time tie, input order kept
  CHECK(game[1].player_id == 4);
  CHECK(game[2].player_id == 2);
  CHECK(game[3].half == 2);
}

TEST_CASE("serialize-parse round trip reproduces identical events") {
  Rng rng(23);
  std::ostringstream body;
  for (int i = 0; i < 300; ++i) {
    const int type = rng.uniform() < 0.8 ? 8 : 10;
    const int subtype = type == 8 ? 85 : 100;
    body << (1 + rng.below(3)) << ',' << (1 + rng.below(2)) << ','
         << csv::fmt(std::round(rng.uniform(0, 2700) * 1000.0) / 1000.0) << ','
         << (10 + rng.below(2)) << ',' << (100 + rng.below(30)) << ',' << type
         << ',' << subtype;
    for (int c = 0; c < 4; ++c) {
      body << ',' << csv::fmt(std::round(rng.uniform(0, 100) * 100.0) / 100.0);
    }
    body << '\n';
  }
  auto store = parse(body.str());
  REQUIRE(store.events().size() == 300);
  auto reparsed = parse_events_text(events_to_csv(store),
                                    TaxonomyTable::defaults(), {}, "rt");
  REQUIRE(reparsed.events().size() == store.events().size());
  for (std::size_t i = 0; i < store.events().size(); ++i) {
    CHECK(reparsed.events()[i] == store.events()[i]);
  }
  // Re-serialization is byte stable.
  CHECK(events_to_csv(reparsed) == events_to_csv(store));
}

TEST_CASE("coordinate normalization mirrors the defending-direction team") {
  std::vector<Fixture> fixtures = {{1, 679, 680, 0, 0, "2014-08-01"}};
  ParseOptions opts;
  opts.provider_normalized = false;
  opts.fixtures = &fixtures;
  auto store = parse(
      "1,1,3,679,1,8,85,10,20,30,40\n"
      "1,1,6,680,2,8,85,10,20,30,40\n"
      "1,2,3,679,3,8,85,10,20,30,40\n",
      opts);
  REQUIRE(store.events().size() == 3);
  // Home in half 1: identity.
  CHECK(store.events()[0].start.x == doctest::Approx(10.5));
  // Away in half 1: mirrored.
  CHECK(store.events()[1].start.x == doctest::Approx(105.0 - 10.5));
  CHECK(store.events()[1].start.y == doctest::Approx(68.0 - 20.4));
  // Home in half 2: mirrored.
  CHECK(store.events()[2].start.x == doctest::Approx(105.0 - 10.5));

  ParseOptions missing;
  missing.provider_normalized = false;
  CHECK_THROWS_AS(parse("1,1,3,679,1,8,85,10,20,30,40\n", missing),
                  ConfigError);
}

TEST_CASE("taxonomy csv round trip and overrides") {
  auto tax = TaxonomyTable::defaults();
  auto reparsed = [&] {
    std::string csv_text = tax.to_csv();
    auto table = csv::parse_table(csv_text, "tax");
    TaxonomyTable out;
    for (const auto& row : table.rows) {
      out.set(static_cast<int>(*csv::to_int(row.fields[0])),
              static_cast<int>(*csv::to_int(row.fields[1])),
              *kind_from_string(row.fields[2]),
              *subkind_from_string(row.fields[3]));
    }
    return out;
  }();
  CHECK(reparsed.lookup(8, 80).kind == EventKind::Pass);
  CHECK(reparsed.lookup(8, 80).subkind == EventSubkind::Cross);
  CHECK(reparsed.lookup(3, 30).subkind == EventSubkind::Corner);
  CHECK(reparsed.lookup(10, 111).kind == EventKind::Goal);
  CHECK(reparsed.lookup(4, 4).kind == EventKind::Other);
}

TEST_CASE("lineup validation enforces the documented invariants") {
  const char* head = "game_id,player_id,team_id,position,minute_on,minute_off\n";
  CHECK_THROWS_AS(
      parse_lineups_text(std::string(head) + "1,5,9,MF,60,60\n", "t"),
      ValidationError);
  CHECK_THROWS_AS(parse_lineups_text(
                      std::string(head) + "1,5,9,MF,0,90\n1,5,9,DF,0,45\n", "t"),
                  ValidationError);
  auto ok = parse_lineups_text(std::string(head) + "1,5,9,GK,0,90\n", "t");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].position == Position::GK);
}

TEST_CASE("minutes_played sums per player over the requested games") {
  std::vector<Lineup> lineups = {
      {1, 5, 9, Position::MF, 0, 90},
      {1, 6, 9, Position::MF, 0, 60},
      {2, 6, 9, Position::MF, 30, 90},
      {3, 6, 9, Position::MF, 0, 90},
  };
  auto minutes = minutes_played(lineups, {1, 2});
  CHECK(minutes[5] == 90);
  CHECK(minutes[6] == 120);
  CHECK(!minutes.contains(7));
  CHECK(minutes_played(lineups, {}).empty());
}
