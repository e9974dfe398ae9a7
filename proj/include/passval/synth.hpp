#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "passval/events.hpp"
#include "passval/xg.hpp"

namespace passval::synth {

// Desk-scale generator with planted structure: per-player pass skill drives
// pass direction and completion, and a known location model drives shots and
// goals, so pipelines run against it have a recoverable ground truth.
struct SynthConfig {
  std::uint64_t seed = 42;
  int n_games = 20;
  int n_teams = 6;
  double half_seconds = 1100.0;  // event-clock length of one half
  double min_gap = 1.0;          // inter-event gap bounds, seconds
  double max_gap = 5.0;

  double possession_continue = 0.90;  // geometric continuation per action
  double dribble_share = 0.155;
  double dribble_loss = 0.06;
  double shot_scale = 1.6;  // shot trigger multiplier on the true xg
  double shot_cap = 0.45;
  double foul_rate = 0.030;
  double offside_rate = 0.03;

  double pass_fwd_base = 2.0;    // mean forward progress of a neutral passer
  double pass_skill_gain = 9.0;  // extra forward meters per unit skill
  double pass_sigma_x = 7.0;
  double pass_sigma_y = 9.0;
  double succ_base = 2.3;  // completion logit: base - len*L + skill*s
  double succ_len_coef = 0.050;
  double succ_skill_coef = 0.9;
  double skill_spread = 1.0;
  double team_bias = 0.35;  // team-level shift applied to player skills
  double penalty_conversion = 0.77;

  void validate() const;  // throws ConfigError
};

struct SynthData {
  std::string events_csv;
  std::string lineups_csv;
  std::string players_csv;
  std::string fixtures_csv;
  std::string truth_csv;  // player_id,skill
  std::map<std::int64_t, double> planted_skill;
};

// Known scoring model: logistic in distance and post angle, monotone
// decreasing in distance along the center line.
double true_xg(PitchPoint p);

SynthData generate(const SynthConfig& config);

// Writes events.csv, lineups.csv, players.csv, fixtures.csv, truth.csv.
void write_files(const SynthData& data, const std::string& dir);

// Independent shot sampler for model evaluation: locations biased toward
// goal, labels Bernoulli(true_xg).
std::vector<LabeledShot> sample_labeled_shots(std::size_t n,
                                              std::uint64_t seed);

}  // namespace passval::synth
