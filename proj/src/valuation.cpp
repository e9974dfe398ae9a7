#include "passval/valuation.hpp"

#include <algorithm>
#include <sstream>

#include "passval/csv.hpp"

namespace passval {

PassValue value_pass(const ClusterIndex& index, const Subsequence* sub_before,
                     const Subsequence& sub_after, bool successful, int k) {
  PassValue pv;
  pv.sequence_id = sub_after.sequence_id;
  pv.pass_index = sub_after.pass_index;
  const Event& pass = sub_after.events.back();
  pv.game_id = pass.game_id;
  pv.player_id = pass.player_id;
  pv.team_id = pass.team_id;
  pv.successful = successful;
  pv.before = sub_before ? expected_reward(index, *sub_before, k) : 0.0;
  pv.after = successful ? expected_reward(index, sub_after, k) : 0.0;
  pv.value = pv.after - pv.before;
  return pv;
}

std::vector<PassValue> value_game(const ClusterIndex& index,
                                  std::span<const PossessionSequence> seqs,
                                  int k, QueryStats* stats,
                                  bool exclude_self) {
  std::vector<PassValue> out;
  for (const PossessionSequence& seq : seqs) {
    const auto subs = enumerate_subsequences(seq);
    if (subs.empty()) continue;

    // One reward per subsequence; reused on both sides of each pass.
    std::vector<double> reward(subs.size());
    QueryOptions opts;
    opts.k = k;
    opts.stats = stats;
    if (exclude_self) opts.exclude_sequence_id = seq.sequence_id;
    for (std::size_t j = 0; j < subs.size(); ++j) {
      reward[j] = expected_reward(index, subs[j], opts);
    }

    // Locate each pass within the sequence to query its success.
    std::vector<std::size_t> pass_positions;
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
      if (seq.events[i].is_pass()) pass_positions.push_back(i);
    }

    for (std::size_t j = 0; j < subs.size(); ++j) {
      const bool successful = pass_success(seq, pass_positions[j]);
      PassValue pv;
      pv.game_id = seq.game_id;
      pv.sequence_id = seq.sequence_id;
      pv.pass_index = subs[j].pass_index;
      const Event& pass = subs[j].events.back();
      pv.player_id = pass.player_id;
      pv.team_id = pass.team_id;
      pv.successful = successful;
      pv.before = j == 0 ? 0.0 : reward[j - 1];
      pv.after = successful ? reward[j] : 0.0;
      pv.value = pv.after - pv.before;
      out.push_back(pv);
    }
  }
  return out;
}

std::vector<PlayerRating> rate_players(
    std::span<const PassValue> values,
    const std::map<std::int64_t, double>& minutes, double min_minutes,
    const std::map<std::int64_t, Position>& positions) {
  struct Acc {
    double total = 0.0;
    std::int64_t passes = 0;
    std::int64_t successful = 0;
    std::int64_t team_id = 0;
  };
  std::map<std::int64_t, Acc> acc;
  for (const PassValue& v : values) {
    Acc& a = acc[v.player_id];
    a.total += v.value;
    a.passes += 1;
    a.successful += v.successful ? 1 : 0;
    a.team_id = v.team_id;
  }

  std::vector<PlayerRating> out;
  for (const auto& [player, a] : acc) {
    auto mit = minutes.find(player);
    const double mins = mit == minutes.end() ? 0.0 : mit->second;
    if (mins <= 0.0) {
      throw ValidationError("player " + std::to_string(player) +
                            " has pass values but no recorded minutes");
    }
    if (mins < min_minutes) continue;
    PlayerRating r;
    r.player_id = player;
    r.total_value = a.total;
    r.minutes = mins;
    r.contribution_p90 = a.total * 90.0 / mins;
    r.passes = a.passes;
    r.successful_passes = a.successful;
    r.passes_p90 = static_cast<double>(a.passes) * 90.0 / mins;
    r.pass_accuracy =
        static_cast<double>(a.successful) / static_cast<double>(a.passes);
    r.team_id = a.team_id;
    auto pit = positions.find(player);
    if (pit != positions.end()) r.position = pit->second;
    out.push_back(r);
  }
  return out;
}

std::vector<PlayerRating> rate_players(std::span<const PassValue> values,
                                       std::span<const Lineup> lineups,
                                       const std::set<std::int64_t>& games,
                                       double min_minutes) {
  std::map<std::int64_t, Position> positions;
  for (const Lineup& l : lineups) {
    if (!games.contains(l.game_id)) continue;
    positions.emplace(l.player_id, l.position);
  }
  return rate_players(values, minutes_played(lineups, games), min_minutes,
                      positions);
}

std::string pass_values_to_csv(std::span<const PassValue> values) {
  std::ostringstream os;
  os << "game_id,sequence_id,pass_index,player_id,before,after,value\n";
  for (const PassValue& v : values) {
    os << v.game_id << ',' << v.sequence_id << ',' << v.pass_index << ','
       << v.player_id << ',' << csv::fmt(v.before) << ',' << csv::fmt(v.after)
       << ',' << csv::fmt(v.value) << '\n';
  }
  return os.str();
}

std::vector<PassValue> parse_pass_values_csv(std::string_view text,
                                             std::string_view context) {
  auto table = csv::parse_table(text, context);
  const std::size_t c_game = table.require_column("game_id", context);
  const std::size_t c_seq = table.require_column("sequence_id", context);
  const std::size_t c_pass = table.require_column("pass_index", context);
  const std::size_t c_player = table.require_column("player_id", context);
  const std::size_t c_before = table.require_column("before", context);
  const std::size_t c_after = table.require_column("after", context);
  const std::size_t c_value = table.require_column("value", context);
  std::vector<PassValue> out;
  for (const auto& row : table.rows) {
    auto game = csv::to_int(row.fields[c_game]);
    auto seq = csv::to_int(row.fields[c_seq]);
    auto pass = csv::to_int(row.fields[c_pass]);
    auto player = csv::to_int(row.fields[c_player]);
    auto before = csv::to_double(row.fields[c_before]);
    auto after = csv::to_double(row.fields[c_after]);
    auto value = csv::to_double(row.fields[c_value]);
    if (!game || !seq || !pass || !player || !before || !after || !value) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": malformed pass value row");
    }
    PassValue v;
    v.game_id = *game;
    v.sequence_id = *seq;
    v.pass_index = static_cast<int>(*pass);
    v.player_id = *player;
    v.before = *before;
    v.after = *after;
    v.value = *value;
    out.push_back(v);
  }
  return out;
}

std::string ratings_to_csv(std::span<const PlayerRating> ratings,
                           const std::map<std::int64_t, PlayerInfo>& players) {
  std::ostringstream os;
  os << "player_id,player_name,team,position,minutes,contribution_p90,"
        "passes_p90,pass_accuracy\n";
  for (const PlayerRating& r : ratings) {
    auto it = players.find(r.player_id);
    const std::string name =
        it != players.end() ? it->second.name
                            : "player_" + std::to_string(r.player_id);
    os << r.player_id << ',' << name << ',' << r.team_id << ','
       << to_string(r.position) << ',' << csv::fmt(r.minutes) << ','
       << csv::fmt(r.contribution_p90) << ',' << csv::fmt(r.passes_p90) << ','
       << csv::fmt(r.pass_accuracy) << '\n';
  }
  return os.str();
}

std::vector<PlayerRating> parse_ratings_csv(std::string_view text,
                                            std::string_view context) {
  auto table = csv::parse_table(text, context);
  const std::size_t c_player = table.require_column("player_id", context);
  const std::size_t c_team = table.require_column("team", context);
  const std::size_t c_pos = table.require_column("position", context);
  const std::size_t c_minutes = table.require_column("minutes", context);
  const std::size_t c_p90 = table.require_column("contribution_p90", context);
  const std::size_t c_passes = table.require_column("passes_p90", context);
  const std::size_t c_acc = table.require_column("pass_accuracy", context);
  std::vector<PlayerRating> out;
  for (const auto& row : table.rows) {
    auto player = csv::to_int(row.fields[c_player]);
    auto team = csv::to_int(row.fields[c_team]);
    auto pos = position_from_string(row.fields[c_pos]);
    auto mins = csv::to_double(row.fields[c_minutes]);
    auto p90 = csv::to_double(row.fields[c_p90]);
    auto passes = csv::to_double(row.fields[c_passes]);
    auto acc = csv::to_double(row.fields[c_acc]);
    if (!player || !team || !pos || !mins || !p90 || !passes || !acc) {
      throw ValidationError(std::string(context) + ":" +
                            std::to_string(row.line_no) +
                            ": malformed rating row");
    }
    PlayerRating r;
    r.player_id = *player;
    r.team_id = *team;
    r.position = *pos;
    r.minutes = *mins;
    r.contribution_p90 = *p90;
    r.passes_p90 = *passes;
    r.pass_accuracy = *acc;
    r.total_value = *p90 * *mins / 90.0;
    out.push_back(r);
  }
  return out;
}

}  // namespace passval
