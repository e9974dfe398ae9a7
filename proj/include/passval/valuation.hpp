#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "passval/knn_index.hpp"

namespace passval {

// Expected-goals delta attributed to one pass.
struct PassValue {
  std::int64_t game_id = 0;
  std::int64_t sequence_id = 0;
  int pass_index = 0;
  std::int64_t player_id = 0;
  double before = 0.0;
  double after = 0.0;
  double value = 0.0;  // after - before
  // Bookkeeping for rating aggregation; not part of the file format.
  bool successful = true;
  std::int64_t team_id = 0;
};

// before = 0 for the first pass of a sequence; after = 0 when the pass is
// unsuccessful.
PassValue value_pass(const ClusterIndex& index, const Subsequence* sub_before,
                     const Subsequence& sub_after, bool successful, int k);

// One PassValue per pass of every sequence. Rewards are evaluated once per
// subsequence and shared between the after side of pass i and the before
// side of pass i+1, which makes the telescoping identity exact.
std::vector<PassValue> value_game(const ClusterIndex& index,
                                  std::span<const PossessionSequence> seqs,
                                  int k, QueryStats* stats = nullptr,
                                  bool exclude_self = false);

struct PlayerRating {
  std::int64_t player_id = 0;
  double total_value = 0.0;
  double minutes = 0.0;
  double contribution_p90 = 0.0;
  double passes_p90 = 0.0;
  double pass_accuracy = 0.0;
  std::int64_t passes = 0;
  std::int64_t successful_passes = 0;
  Position position = Position::MF;
  std::int64_t team_id = 0;
};

// Sums pass values per player and normalizes per 90 minutes. Players under
// min_minutes are dropped. A player with pass values but no recorded minutes
// is a data inconsistency and throws.
std::vector<PlayerRating> rate_players(
    std::span<const PassValue> values,
    const std::map<std::int64_t, double>& minutes, double min_minutes,
    const std::map<std::int64_t, Position>& positions);

// Convenience: minutes/positions derived from the lineups of `games`.
std::vector<PlayerRating> rate_players(std::span<const PassValue> values,
                                       std::span<const Lineup> lineups,
                                       const std::set<std::int64_t>& games,
                                       double min_minutes);

std::string pass_values_to_csv(std::span<const PassValue> values);
std::vector<PassValue> parse_pass_values_csv(std::string_view text,
                                             std::string_view context);

std::string ratings_to_csv(std::span<const PlayerRating> ratings,
                           const std::map<std::int64_t, PlayerInfo>& players);
std::vector<PlayerRating> parse_ratings_csv(std::string_view text,
                                            std::string_view context);

}  // namespace passval
