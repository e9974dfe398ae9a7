#include "passval/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace passval {

namespace {

std::array<double, 3> metrics_of(const PlayerRating& r) {
  return {r.contribution_p90, r.passes_p90, r.pass_accuracy};
}

}  // namespace

std::vector<SimilarPlayer> similar_players(
    std::int64_t target, std::span<const PlayerRating> pool,
    const std::map<std::int64_t, PlayerInfo>& players,
    const SimilarityFilters& filters, int top_n) {
  const PlayerRating* target_rating = nullptr;
  std::vector<const PlayerRating*> candidates;
  for (const PlayerRating& r : pool) {
    if (r.player_id == target) {
      target_rating = &r;
      continue;
    }
    if (r.minutes < filters.min_minutes) continue;
    if (filters.born_after) {
      auto it = players.find(r.player_id);
      // ISO dates compare lexicographically.
      if (it == players.end() || it->second.birth_date <= *filters.born_after)
        continue;
    }
    candidates.push_back(&r);
  }
  if (target_rating == nullptr) {
    throw ValidationError("similar_players: target " + std::to_string(target) +
                          " not in the rating pool");
  }
  if (candidates.empty()) return {};

  // Min-max bounds over candidates plus the target.
  std::array<double, 3> lo = metrics_of(*target_rating);
  std::array<double, 3> hi = lo;
  for (const PlayerRating* r : candidates) {
    const auto m = metrics_of(*r);
    for (int i = 0; i < 3; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
    }
  }
  auto normalize = [&](const std::array<double, 3>& m) {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
      const double span = hi[i] - lo[i];
      out[i] = span > 0.0 ? (m[i] - lo[i]) / span : 0.0;
    }
    return out;
  };

  const auto tv = normalize(metrics_of(*target_rating));
  std::vector<SimilarPlayer> out;
  out.reserve(candidates.size());
  for (const PlayerRating* r : candidates) {
    const auto v = normalize(metrics_of(*r));
    double sq = 0.0;
    for (std::size_t i = 0; i < 3; ++i) sq += (v[i] - tv[i]) * (v[i] - tv[i]);
    out.push_back(SimilarPlayer{r->player_id,
                                1.0 - std::sqrt(sq) / std::sqrt(3.0)});
  }
  std::sort(out.begin(), out.end(), [](const SimilarPlayer& a, const SimilarPlayer& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.player_id < b.player_id;
  });
  if (top_n >= 0 && out.size() > static_cast<std::size_t>(top_n)) {
    out.resize(static_cast<std::size_t>(top_n));
  }
  return out;
}

}  // namespace passval
