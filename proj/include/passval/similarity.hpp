#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passval/valuation.hpp"

namespace passval {

struct SimilarityFilters {
  std::optional<std::string> born_after;  // ISO date, exclusive bound
  double min_minutes = 900.0;
};

struct SimilarPlayer {
  std::int64_t player_id = 0;
  double score = 0.0;  // 1 at identical metrics, 0 at opposite corners
};

// Ranks the pool by closeness to the target over (contribution_p90,
// passes_p90, pass_accuracy), min-max normalized across the filtered pool
// plus the target. score = 1 - euclidean distance / sqrt(3). The target is
// kept for normalization but never returned. Throws when the target is
// missing from the pool.
std::vector<SimilarPlayer> similar_players(
    std::int64_t target, std::span<const PlayerRating> pool,
    const std::map<std::int64_t, PlayerInfo>& players,
    const SimilarityFilters& filters, int top_n);

}  // namespace passval
