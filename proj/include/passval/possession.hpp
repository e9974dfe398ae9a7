#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "passval/events.hpp"
#include "passval/xg.hpp"

namespace passval {

enum class TerminalReason { Turnover, Goal, Foul, BallOut, HalfEnd };

std::string_view to_string(TerminalReason r);

// Maximal run of consecutive same-team events. Shots and goals terminate the
// run they belong to; foul and ball-out rows are restart markers and form
// their own single-event runs, so a pass directly before them stays the final
// event of its sequence.
struct PossessionSequence {
  std::int64_t sequence_id = 0;
  std::int64_t game_id = 0;
  std::int64_t team_id = 0;
  std::vector<Event> events;
  TerminalReason terminal_reason = TerminalReason::HalfEnd;
  std::int64_t foul_by_team = -1;  // set when terminal_reason == Foul
  double label = 0.0;              // expected goals of the closing shot, else 0
};

// Prefix of a possession sequence ending at one of its passes.
struct Subsequence {
  std::int64_t sequence_id = 0;
  int pass_index = 0;  // 0-based ordinal of the terminating pass
  std::vector<Event> events;
  double label = 0.0;
  // When the terminating pass arrives: the next event's timestamp inside the
  // parent when one exists, else timestamp + kDefaultPassDuration.
  double final_arrival = 0.0;
};

// Nominal flight time used when no following event pins the arrival.
inline constexpr double kDefaultPassDuration = 1.5;

std::vector<PossessionSequence> segment_possessions(
    std::span<const Event> game_events);

// True unless the pass ends its sequence with the ball lost: terminal pass
// with reason Turnover or BallOut, or a Foul committed by the passing team
// (an offside call). Throws when events[event_index] is not a pass.
bool pass_success(const PossessionSequence& seq, std::size_t event_index);

std::vector<Subsequence> enumerate_subsequences(const PossessionSequence& seq);

void label_sequences(std::span<PossessionSequence> seqs, const XgModel& model);

std::string sequences_to_csv(std::span<const PossessionSequence> seqs);

}  // namespace passval
