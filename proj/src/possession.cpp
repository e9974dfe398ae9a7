#include "passval/possession.hpp"

#include <algorithm>
#include <sstream>

#include "passval/csv.hpp"

namespace passval {

std::string_view to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::Turnover: return "Turnover";
    case TerminalReason::Goal: return "Goal";
    case TerminalReason::Foul: return "Foul";
    case TerminalReason::BallOut: return "BallOut";
    case TerminalReason::HalfEnd: return "HalfEnd";
  }
  return "Turnover";
}

std::vector<PossessionSequence> segment_possessions(
    std::span<const Event> game_events) {
  std::vector<PossessionSequence> out;
  PossessionSequence cur;
  bool open = false;

  auto next_id = [&]() {
    return cur.game_id * 100000 + static_cast<std::int64_t>(out.size());
  };
  auto close = [&](TerminalReason reason, std::int64_t foul_by = -1) {
    cur.terminal_reason = reason;
    cur.foul_by_team = reason == TerminalReason::Foul ? foul_by : -1;
    cur.sequence_id = next_id();
    out.push_back(std::move(cur));
    cur = PossessionSequence{};
    open = false;
  };
  auto start = [&](const Event& e) {
    cur = PossessionSequence{};
    cur.game_id = e.game_id;
    cur.team_id = e.team_id;
    open = true;
  };

  for (const Event& e : game_events) {
    if (open && e.half != cur.events.front().half) {
      close(TerminalReason::HalfEnd);
    }

    if (e.kind == EventKind::Foul || e.kind == EventKind::BallOut) {
      // Restart markers end the run in progress and stand alone, so the pass
      // before them remains its sequence's terminal event.
      const TerminalReason reason = e.kind == EventKind::Foul
                                        ? TerminalReason::Foul
                                        : TerminalReason::BallOut;
      if (open) close(reason, e.team_id);
      start(e);
      cur.events.push_back(e);
      close(reason, e.team_id);
      continue;
    }

    if (open && e.team_id != cur.team_id) {
      close(TerminalReason::Turnover);
    }
    if (!open) start(e);
    cur.events.push_back(e);

    if (e.kind == EventKind::Goal) {
      close(TerminalReason::Goal);
    } else if (e.kind == EventKind::Shot) {
      // A shot ends its possession; rebound play starts a new sequence. The
      // reason enum has no shot entry, so a saved or missed attempt reads as
      // a turnover.
      close(TerminalReason::Turnover);
    }
  }
  if (open) close(TerminalReason::HalfEnd);
  return out;
}

bool pass_success(const PossessionSequence& seq, std::size_t event_index) {
  if (event_index >= seq.events.size() ||
      !seq.events[event_index].is_pass()) {
    throw ValidationError("pass_success: index does not point at a pass");
  }
  if (event_index + 1 < seq.events.size()) return true;
  switch (seq.terminal_reason) {
    case TerminalReason::Turnover:
    case TerminalReason::BallOut:
      return false;
    case TerminalReason::Foul:
      // Fouled by the opponent: the team keeps the ball at the restart.
      // Fouled by itself (offside pass): possession is gone.
      return seq.foul_by_team != seq.team_id;
    case TerminalReason::Goal:
    case TerminalReason::HalfEnd:
      return true;
  }
  return true;
}

std::vector<Subsequence> enumerate_subsequences(const PossessionSequence& seq) {
  std::vector<Subsequence> out;
  int pass_ordinal = 0;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    if (!seq.events[i].is_pass()) continue;
    Subsequence sub;
    sub.sequence_id = seq.sequence_id;
    sub.pass_index = pass_ordinal++;
    sub.events.assign(seq.events.begin(),
                      seq.events.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    sub.label = seq.label;
    const Event& last = seq.events[i];
    sub.final_arrival = i + 1 < seq.events.size()
                            ? std::max(seq.events[i + 1].timestamp, last.timestamp)
                            : last.timestamp + kDefaultPassDuration;
    out.push_back(std::move(sub));
  }
  return out;
}

void label_sequences(std::span<PossessionSequence> seqs, const XgModel& model) {
  for (PossessionSequence& seq : seqs) {
    if (seq.events.empty() || !seq.events.back().is_shot()) {
      seq.label = 0.0;
      continue;
    }
    seq.label = model.predict_event(seq.events.back());
  }
}

std::string sequences_to_csv(std::span<const PossessionSequence> seqs) {
  // Sequences partition the game's ordered event stream, so event indices
  // are a running count.
  std::ostringstream os;
  os << "sequence_id,game_id,team_id,first_event_index,last_event_index,"
        "terminal_reason,label\n";
  std::size_t offset = 0;
  std::int64_t current_game = seqs.empty() ? 0 : seqs.front().game_id;
  for (const auto& seq : seqs) {
    if (seq.game_id != current_game) {
      current_game = seq.game_id;
      offset = 0;
    }
    const std::size_t first = offset;
    const std::size_t last = offset + seq.events.size() - 1;
    offset += seq.events.size();
    os << seq.sequence_id << ',' << seq.game_id << ',' << seq.team_id << ','
       << first << ',' << last << ',' << to_string(seq.terminal_reason) << ','
       << csv::fmt(seq.label) << '\n';
  }
  return os.str();
}

}  // namespace passval
