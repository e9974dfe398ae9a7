#include "passval/events.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "passval/csv.hpp"

namespace passval {

PitchPoint to_pitch_meters(double pct_x, double pct_y) {
  if (!(pct_x >= 0.0 && pct_x <= 100.0) || !(pct_y >= 0.0 && pct_y <= 100.0)) {
    throw ValidationError("coordinate outside [0,100]: (" + csv::fmt(pct_x) +
                          ", " + csv::fmt(pct_y) + ")");
  }
  return PitchPoint{pct_x * kPitchLength / 100.0, pct_y * kPitchWidth / 100.0};
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Pass: return "Pass";
    case EventKind::Shot: return "Shot";
    case EventKind::Dribble: return "Dribble";
    case EventKind::SetPiece: return "SetPiece";
    case EventKind::Foul: return "Foul";
    case EventKind::BallOut: return "BallOut";
    case EventKind::Goal: return "Goal";
    case EventKind::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(EventSubkind s) {
  switch (s) {
    case EventSubkind::None: return "none";
    case EventSubkind::Cross: return "cross";
    case EventSubkind::HighPass: return "high_pass";
    case EventSubkind::Corner: return "corner";
    case EventSubkind::FreeKick: return "free_kick";
    case EventSubkind::GoalKick: return "goal_kick";
    case EventSubkind::Penalty: return "penalty";
    case EventSubkind::OpenPlay: return "open_play";
  }
  return "none";
}

std::optional<EventKind> kind_from_string(std::string_view s) {
  static const std::pair<std::string_view, EventKind> table[] = {
      {"Pass", EventKind::Pass},       {"Shot", EventKind::Shot},
      {"Dribble", EventKind::Dribble}, {"SetPiece", EventKind::SetPiece},
      {"Foul", EventKind::Foul},       {"BallOut", EventKind::BallOut},
      {"Goal", EventKind::Goal},       {"Other", EventKind::Other},
  };
  for (auto& [name, kind] : table) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

std::optional<EventSubkind> subkind_from_string(std::string_view s) {
  static const std::pair<std::string_view, EventSubkind> table[] = {
      {"none", EventSubkind::None},
      {"cross", EventSubkind::Cross},
      {"high_pass", EventSubkind::HighPass},
      {"corner", EventSubkind::Corner},
      {"free_kick", EventSubkind::FreeKick},
      {"goal_kick", EventSubkind::GoalKick},
      {"penalty", EventSubkind::Penalty},
      {"open_play", EventSubkind::OpenPlay},
  };
  for (auto& [name, sub] : table) {
    if (name == s) return sub;
  }
  return std::nullopt;
}

void TaxonomyTable::set(int type, int subtype, EventKind kind,
                        EventSubkind subkind) {
  map_[{type, subtype}] = TaxonomyEntry{kind, subkind};
}

TaxonomyEntry TaxonomyTable::lookup(int type, int subtype) const {
  auto it = map_.find({type, subtype});
  if (it == map_.end()) return TaxonomyEntry{EventKind::Other, EventSubkind::None};
  return it->second;
}

TaxonomyTable TaxonomyTable::defaults() {
  TaxonomyTable t;
  // Open-play passes (type 8).
  t.set(8, 80, EventKind::Pass, EventSubkind::Cross);
  t.set(8, 83, EventKind::Pass, EventSubkind::HighPass);
  t.set(8, 85, EventKind::Pass, EventSubkind::OpenPlay);
  t.set(8, 86, EventKind::Pass, EventSubkind::OpenPlay);
  // Set pieces (type 3). Restart passes keep kind Pass so they are valued
  // like every other pass; throw-ins carry the ball by hand and are not.
  t.set(3, 30, EventKind::Pass, EventSubkind::Corner);
  t.set(3, 31, EventKind::Pass, EventSubkind::FreeKick);
  t.set(3, 32, EventKind::Pass, EventSubkind::FreeKick);
  t.set(3, 33, EventKind::Shot, EventSubkind::FreeKick);
  t.set(3, 34, EventKind::Pass, EventSubkind::GoalKick);
  t.set(3, 36, EventKind::SetPiece, EventSubkind::None);
  // Dribbles and carries (type 1).
  t.set(1, 70, EventKind::Dribble, EventSubkind::None);
  t.set(1, 71, EventKind::Dribble, EventSubkind::None);
  // Fouls (type 2); 22 is an offside call against the acting team.
  t.set(2, 20, EventKind::Foul, EventSubkind::None);
  t.set(2, 22, EventKind::Foul, EventSubkind::None);
  // Interruptions (type 5).
  t.set(5, 50, EventKind::BallOut, EventSubkind::None);
  t.set(5, 51, EventKind::Other, EventSubkind::None);
  // Shots (type 10); scored attempts carry a distinct subtype.
  t.set(10, 100, EventKind::Shot, EventSubkind::None);
  t.set(10, 101, EventKind::Goal, EventSubkind::None);
  t.set(10, 110, EventKind::Shot, EventSubkind::Penalty);
  t.set(10, 111, EventKind::Goal, EventSubkind::Penalty);
  return t;
}

TaxonomyTable TaxonomyTable::from_csv(const std::string& path) {
  auto table = csv::read_table(path);
  std::size_t c_type = table.require_column("type", path);
  std::size_t c_subtype = table.require_column("subtype", path);
  std::size_t c_kind = table.require_column("kind", path);
  std::size_t c_subkind = table.require_column("subkind", path);
  TaxonomyTable out;
  for (const auto& row : table.rows) {
    auto type = csv::to_int(row.fields[c_type]);
    auto subtype = csv::to_int(row.fields[c_subtype]);
    auto kind = kind_from_string(row.fields[c_kind]);
    auto subkind = subkind_from_string(row.fields[c_subkind]);
    if (!type || !subtype || !kind || !subkind) {
      throw ValidationError(path + ":" + std::to_string(row.line_no) +
                            ": malformed taxonomy row");
    }
    out.set(static_cast<int>(*type), static_cast<int>(*subtype), *kind,
            *subkind);
  }
  return out;
}

std::string TaxonomyTable::to_csv() const {
  std::ostringstream os;
  os << "type,subtype,kind,subkind\n";
  for (const auto& [codes, entry] : map_) {
    os << codes.first << ',' << codes.second << ',' << to_string(entry.kind)
       << ',' << to_string(entry.subkind) << '\n';
  }
  return os.str();
}

void TaxonomyTable::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << to_csv();
}

std::span<const Event> EventStore::game(std::int64_t game_id) const {
  auto it = ranges_.find(game_id);
  if (it == ranges_.end()) return {};
  return std::span<const Event>(events_.data() + it->second.first,
                                it->second.second - it->second.first);
}

std::vector<std::int64_t> EventStore::game_ids() const {
  std::vector<std::int64_t> ids;
  ids.reserve(ranges_.size());
  for (const auto& [id, _] : ranges_) ids.push_back(id);
  return ids;
}

EventStore EventStore::build(std::vector<Event> events,
                             std::vector<RowIssue> skipped) {
  // Stable sort keeps ingestion order for (half, timestamp) ties, making the
  // per-game ordering a total order.
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) {
                     if (a.game_id != b.game_id) return a.game_id < b.game_id;
                     if (a.half != b.half) return a.half < b.half;
                     return a.timestamp < b.timestamp;
                   });
  EventStore store;
  store.events_ = std::move(events);
  store.skipped_ = std::move(skipped);
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= store.events_.size(); ++i) {
    if (i == store.events_.size() ||
        (i > begin && store.events_[i].game_id != store.events_[begin].game_id)) {
      if (i > begin) {
        store.ranges_[store.events_[begin].game_id] = {begin, i};
      }
      begin = i;
    }
  }
  return store;
}

namespace {

struct FixtureSides {
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> home_away;
};

FixtureSides fixture_sides(const std::vector<Fixture>* fixtures) {
  FixtureSides sides;
  if (fixtures) {
    for (const auto& f : *fixtures) {
      sides.home_away[f.game_id] = {f.home_team, f.away_team};
    }
  }
  return sides;
}

}  // namespace

EventStore parse_events_text(std::string_view text, const TaxonomyTable& tax,
                             const ParseOptions& opts,
                             std::string_view context) {
  if (!opts.provider_normalized && opts.fixtures == nullptr) {
    throw ConfigError(
        "coordinate normalization requires fixtures to identify home/away");
  }
  auto table = csv::parse_table(text, context);
  const std::size_t c_game = table.require_column("game_id", context);
  const std::size_t c_half = table.require_column("half", context);
  const std::size_t c_time = table.require_column("time", context);
  const std::size_t c_team = table.require_column("team", context);
  const std::size_t c_player = table.require_column("player", context);
  const std::size_t c_type = table.require_column("type", context);
  const std::size_t c_subtype = table.require_column("subtype", context);
  const std::size_t c_sx = table.require_column("start_x", context);
  const std::size_t c_ex = table.require_column("end_x", context);
  const std::size_t c_sy = table.require_column("start_y", context);
  const std::size_t c_ey = table.require_column("end_y", context);
  const std::size_t n_cols = table.header.size();

  const FixtureSides sides = fixture_sides(opts.fixtures);

  std::vector<Event> events;
  events.reserve(table.rows.size());
  std::vector<RowIssue> skipped;

  auto fail = [&](std::size_t line_no, const std::string& message) {
    if (opts.strict) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(line_no) + ": " + message);
    }
    skipped.push_back(RowIssue{line_no, message});
  };

  for (const auto& row : table.rows) {
    if (row.fields.size() != n_cols) {
      fail(row.line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                            std::to_string(row.fields.size()));
      continue;
    }
    auto game = csv::to_int(row.fields[c_game]);
    auto half = csv::to_int(row.fields[c_half]);
    auto time = csv::to_double(row.fields[c_time]);
    auto team = csv::to_int(row.fields[c_team]);
    auto player = csv::to_int(row.fields[c_player]);
    auto type = csv::to_int(row.fields[c_type]);
    auto subtype = csv::to_int(row.fields[c_subtype]);
    auto sx = csv::to_double(row.fields[c_sx]);
    auto ex = csv::to_double(row.fields[c_ex]);
    auto sy = csv::to_double(row.fields[c_sy]);
    auto ey = csv::to_double(row.fields[c_ey]);
    if (!game || !half || !time || !team || !player || !type || !subtype ||
        !sx || !ex || !sy || !ey) {
      fail(row.line_no, "unparseable field");
      continue;
    }
    if (*half != 1 && *half != 2) {
      fail(row.line_no, "half must be 1 or 2");
      continue;
    }
    if (*time < 0.0) {
      fail(row.line_no, "negative time");
      continue;
    }
    const double coords[4] = {*sx, *ex, *sy, *ey};
    bool in_range = true;
    for (double c : coords) {
      if (!(c >= 0.0 && c <= 100.0)) in_range = false;
    }
    if (!in_range) {
      fail(row.line_no, "coordinate outside [0,100]");
      continue;
    }

    double psx = *sx, pex = *ex, psy = *sy, pey = *ey;
    if (!opts.provider_normalized) {
      auto it = sides.home_away.find(*game);
      if (it == sides.home_away.end()) {
        fail(row.line_no, "game missing from fixtures, cannot normalize");
        continue;
      }
      // Home attacks toward x max in half 1; mirror everything else.
      const bool attacks_forward = (*team == it->second.first) == (*half == 1);
      if (!attacks_forward) {
        psx = 100.0 - psx;
        pex = 100.0 - pex;
        psy = 100.0 - psy;
        pey = 100.0 - pey;
      }
    }

    Event e;
    e.game_id = *game;
    e.half = static_cast<int>(*half);
    e.timestamp = *time;
    e.team_id = *team;
    e.player_id = *player;
    e.provider_type = static_cast<int>(*type);
    e.provider_subtype = static_cast<int>(*subtype);
    TaxonomyEntry entry = tax.lookup(e.provider_type, e.provider_subtype);
    e.kind = entry.kind;
    e.subkind = entry.subkind;
    e.pct_start_x = psx;
    e.pct_end_x = pex;
    e.pct_start_y = psy;
    e.pct_end_y = pey;
    e.start = to_pitch_meters(psx, psy);
    e.end = to_pitch_meters(pex, pey);
    events.push_back(e);
  }
  return EventStore::build(std::move(events), std::move(skipped));
}

EventStore parse_events(const std::string& path, const TaxonomyTable& tax,
                        const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_events_text(buf.str(), tax, opts, path);
}

std::string events_to_csv(const EventStore& store) {
  std::ostringstream os;
  os << "game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y\n";
  for (const auto& e : store.events()) {
    os << e.game_id << ',' << e.half << ',' << csv::fmt(e.timestamp) << ','
       << e.team_id << ',' << e.player_id << ',' << e.provider_type << ','
       << e.provider_subtype << ',' << csv::fmt(e.pct_start_x) << ','
       << csv::fmt(e.pct_end_x) << ',' << csv::fmt(e.pct_start_y) << ','
       << csv::fmt(e.pct_end_y) << '\n';
  }
  return os.str();
}

void write_events_csv(const std::string& path, const EventStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << events_to_csv(store);
}

std::string_view to_string(Position p) {
  switch (p) {
    case Position::GK: return "GK";
    case Position::DF: return "DF";
    case Position::MF: return "MF";
    case Position::FW: return "FW";
  }
  return "MF";
}

std::optional<Position> position_from_string(std::string_view s) {
  if (s == "GK") return Position::GK;
  if (s == "DF") return Position::DF;
  if (s == "MF") return Position::MF;
  if (s == "FW") return Position::FW;
  return std::nullopt;
}

std::vector<Lineup> parse_lineups_text(std::string_view text,
                                       std::string_view context) {
  auto table = csv::parse_table(text, context);
  const std::size_t c_game = table.require_column("game_id", context);
  const std::size_t c_player = table.require_column("player_id", context);
  const std::size_t c_team = table.require_column("team_id", context);
  const std::size_t c_pos = table.require_column("position", context);
  const std::size_t c_on = table.require_column("minute_on", context);
  const std::size_t c_off = table.require_column("minute_off", context);

  std::vector<Lineup> out;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& row : table.rows) {
    auto game = csv::to_int(row.fields[c_game]);
    auto player = csv::to_int(row.fields[c_player]);
    auto team = csv::to_int(row.fields[c_team]);
    auto pos = position_from_string(row.fields[c_pos]);
    auto on = csv::to_double(row.fields[c_on]);
    auto off = csv::to_double(row.fields[c_off]);
    if (!game || !player || !team || !pos || !on || !off) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": malformed lineup row");
    }
    if (!(*on >= 0.0 && *on < *off)) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": minute_on must be >= 0 and < minute_off");
    }
    if (!seen.insert({*game, *player}).second) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": player listed twice in one game");
    }
    out.push_back(Lineup{*game, *player, *team, *pos, *on, *off});
  }
  return out;
}

std::vector<Lineup> read_lineups(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lineups_text(buf.str(), path);
}

std::string lineups_to_csv(std::span<const Lineup> lineups) {
  std::ostringstream os;
  os << "game_id,player_id,team_id,position,minute_on,minute_off\n";
  for (const auto& l : lineups) {
    os << l.game_id << ',' << l.player_id << ',' << l.team_id << ','
       << to_string(l.position) << ',' << csv::fmt(l.minute_on) << ','
       << csv::fmt(l.minute_off) << '\n';
  }
  return os.str();
}

std::map<std::int64_t, double> minutes_played(
    std::span<const Lineup> lineups, const std::set<std::int64_t>& games) {
  std::map<std::int64_t, double> minutes;
  for (const auto& l : lineups) {
    if (!games.contains(l.game_id)) continue;
    minutes[l.player_id] += l.minute_off - l.minute_on;
  }
  return minutes;
}

std::map<std::int64_t, PlayerInfo> read_players(const std::string& path) {
  auto table = csv::read_table(path);
  const std::size_t c_id = table.require_column("player_id", path);
  const std::size_t c_name = table.require_column("name", path);
  const std::size_t c_birth = table.require_column("birth_date", path);
  const std::size_t c_team = table.require_column("team_id", path);
  std::map<std::int64_t, PlayerInfo> out;
  for (const auto& row : table.rows) {
    auto id = csv::to_int(row.fields[c_id]);
    auto team = csv::to_int(row.fields[c_team]);
    if (!id || !team) {
      throw ValidationError(path + ":" + std::to_string(row.line_no) +
                            ": malformed player row");
    }
    out[*id] = PlayerInfo{*id, row.fields[c_name], row.fields[c_birth], *team};
  }
  return out;
}

std::string players_to_csv(std::span<const PlayerInfo> players) {
  std::ostringstream os;
  os << "player_id,name,birth_date,team_id\n";
  for (const auto& p : players) {
    os << p.player_id << ',' << p.name << ',' << p.birth_date << ','
       << p.team_id << '\n';
  }
  return os.str();
}

std::vector<Fixture> parse_fixtures_text(std::string_view text,
                                         std::string_view context) {
  auto table = csv::parse_table(text, context);
  const std::size_t c_game = table.require_column("game_id", context);
  const std::size_t c_home = table.require_column("home_team", context);
  const std::size_t c_away = table.require_column("away_team", context);
  const std::size_t c_hg = table.require_column("home_goals", context);
  const std::size_t c_ag = table.require_column("away_goals", context);
  const std::size_t c_date = table.require_column("date", context);
  std::vector<Fixture> out;
  for (const auto& row : table.rows) {
    auto game = csv::to_int(row.fields[c_game]);
    auto home = csv::to_int(row.fields[c_home]);
    auto away = csv::to_int(row.fields[c_away]);
    auto hg = csv::to_int(row.fields[c_hg]);
    auto ag = csv::to_int(row.fields[c_ag]);
    if (!game || !home || !away || !hg || !ag || *hg < 0 || *ag < 0) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": malformed fixture row");
    }
    out.push_back(Fixture{*game, *home, *away, static_cast<int>(*hg),
                          static_cast<int>(*ag), row.fields[c_date]});
  }
  return out;
}

std::vector<Fixture> read_fixtures(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixtures_text(buf.str(), path);
}

std::string fixtures_to_csv(std::span<const Fixture> fixtures) {
  std::ostringstream os;
  os << "game_id,home_team,away_team,home_goals,away_goals,date\n";
  for (const auto& f : fixtures) {
    os << f.game_id << ',' << f.home_team << ',' << f.away_team << ','
       << f.home_goals << ',' << f.away_goals << ',' << f.date << '\n';
  }
  return os.str();
}

}  // namespace passval
