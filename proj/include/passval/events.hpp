#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "passval/errors.hpp"

namespace passval {

// All downstream geometry runs in meters on a fixed rectangle; provider files
// carry percent-of-pitch coordinates.
inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;

struct PitchPoint {
  double x = 0.0;  // meters along pitch length, [0, 105]
  double y = 0.0;  // meters along pitch width, [0, 68]
  bool operator==(const PitchPoint&) const = default;
};

// Converts percent-of-pitch coordinates to meters. Throws ValidationError
// when either component falls outside [0, 100].
PitchPoint to_pitch_meters(double pct_x, double pct_y);

enum class EventKind {
  Pass,
  Shot,
  Dribble,
  SetPiece,
  Foul,
  BallOut,
  Goal,  // a shot that scored; counts as a shot everywhere downstream
  Other,
};

enum class EventSubkind {
  None,
  Cross,
  HighPass,
  Corner,
  FreeKick,
  GoalKick,
  Penalty,
  OpenPlay,
};

std::string_view to_string(EventKind k);
std::string_view to_string(EventSubkind s);
std::optional<EventKind> kind_from_string(std::string_view s);
std::optional<EventSubkind> subkind_from_string(std::string_view s);

struct Event {
  std::int64_t game_id = 0;
  int half = 1;
  double timestamp = 0.0;  // seconds from half start
  std::int64_t team_id = 0;
  std::int64_t player_id = 0;
  EventKind kind = EventKind::Other;
  EventSubkind subkind = EventSubkind::None;
  PitchPoint start;
  PitchPoint end;
  // Provider codes and (normalized) percent coordinates are retained so
  // re-serialized files round-trip exactly; meters are a derived cache.
  int provider_type = 0;
  int provider_subtype = 0;
  double pct_start_x = 0.0;
  double pct_end_x = 0.0;
  double pct_start_y = 0.0;
  double pct_end_y = 0.0;

  bool is_pass() const { return kind == EventKind::Pass; }
  bool is_shot() const {
    return kind == EventKind::Shot || kind == EventKind::Goal;
  }
  bool is_goal() const { return kind == EventKind::Goal; }

  bool operator==(const Event&) const = default;
};

struct TaxonomyEntry {
  EventKind kind = EventKind::Other;
  EventSubkind subkind = EventSubkind::None;
};

// Maps provider (type, subtype) codes to event kinds. Editable via CSV;
// unknown pairs resolve to Other.
class TaxonomyTable {
 public:
  void set(int type, int subtype, EventKind kind, EventSubkind subkind);
  TaxonomyEntry lookup(int type, int subtype) const;

  static TaxonomyTable defaults();
  static TaxonomyTable from_csv(const std::string& path);
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::map<std::pair<int, int>, TaxonomyEntry> map_;
};

struct RowIssue {
  std::size_t line_no = 0;
  std::string message;
};

struct Fixture {
  std::int64_t game_id = 0;
  std::int64_t home_team = 0;
  std::int64_t away_team = 0;
  int home_goals = 0;
  int away_goals = 0;
  std::string date;  // ISO yyyy-mm-dd
};

struct ParseOptions {
  bool strict = false;              // abort on first malformed row
  bool provider_normalized = true;  // acting team already attacks toward x max
  // Required when provider_normalized is false: home/away per game, used to
  // mirror coordinates so the acting team attacks toward x = 105.
  const std::vector<Fixture>* fixtures = nullptr;
};

class EventStore {
 public:
  const std::vector<Event>& events() const { return events_; }
  std::span<const Event> game(std::int64_t game_id) const;
  std::vector<std::int64_t> game_ids() const;
  const std::vector<RowIssue>& skipped() const { return skipped_; }

  // Takes events in file order; sorts per game by (half, timestamp, input
  // index) with stable ties.
  static EventStore build(std::vector<Event> events,
                          std::vector<RowIssue> skipped);

 private:
  std::vector<Event> events_;  // grouped by game, ordered within each game
  std::map<std::int64_t, std::pair<std::size_t, std::size_t>> ranges_;
  std::vector<RowIssue> skipped_;
};

EventStore parse_events_text(std::string_view text, const TaxonomyTable& tax,
                             const ParseOptions& opts = {},
                             std::string_view context = "events");
EventStore parse_events(const std::string& path, const TaxonomyTable& tax,
                        const ParseOptions& opts = {});

std::string events_to_csv(const EventStore& store);
void write_events_csv(const std::string& path, const EventStore& store);

enum class Position { GK, DF, MF, FW };

std::string_view to_string(Position p);
std::optional<Position> position_from_string(std::string_view s);

struct Lineup {
  std::int64_t game_id = 0;
  std::int64_t player_id = 0;
  std::int64_t team_id = 0;
  Position position = Position::MF;
  double minute_on = 0.0;
  double minute_off = 90.0;
};

std::vector<Lineup> parse_lineups_text(std::string_view text,
                                       std::string_view context = "lineups");
std::vector<Lineup> read_lineups(const std::string& path);
std::string lineups_to_csv(std::span<const Lineup> lineups);

// Minutes on the pitch summed over the given games; players absent from the
// lineups simply do not appear in the result.
std::map<std::int64_t, double> minutes_played(
    std::span<const Lineup> lineups, const std::set<std::int64_t>& games);

struct PlayerInfo {
  std::int64_t player_id = 0;
  std::string name;
  std::string birth_date;  // ISO yyyy-mm-dd
  std::int64_t team_id = 0;
};

std::map<std::int64_t, PlayerInfo> read_players(const std::string& path);
std::string players_to_csv(std::span<const PlayerInfo> players);

std::vector<Fixture> parse_fixtures_text(std::string_view text,
                                         std::string_view context = "fixtures");
std::vector<Fixture> read_fixtures(const std::string& path);
std::string fixtures_to_csv(std::span<const Fixture> fixtures);

}  // namespace passval
