#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passval/valuation.hpp"

namespace passval {

struct OutcomeForecast {
  double p_home = 0.0;
  double p_draw = 0.0;
  double p_away = 0.0;
};

enum class MatchOutcome { HomeWin, Draw, AwayWin };

std::string_view to_string(MatchOutcome o);
MatchOutcome outcome_of(const Fixture& f);

// Mean and spread of goals per team per game.
struct GoalStats {
  double mean = 0.0;
  double stddev = 0.0;
};

GoalStats goal_stats(std::span<const Fixture> calibration);

// Per-player metric plus per-(team, line) averages used to impute the
// players without a rating of their own.
struct StrengthInputs {
  std::map<std::int64_t, double> player_metric;
  std::map<std::pair<std::int64_t, Position>, double> line_average;
};

enum class StrengthMetric { ContributionP90, PassAccuracy };

StrengthInputs strength_inputs(std::span<const PlayerRating> ratings,
                               StrengthMetric metric);

// Sum over the starting lineup of a team: own metric when rated, else the
// team's line average. nullopt when some line cannot be imputed, which
// excludes the game.
std::optional<double> team_strength(std::span<const Lineup> starters,
                                    const StrengthInputs& inputs);

// Affine map matching the goal distribution's mean and spread, clamped below
// at epsilon. Zero variance in the input collapses everything to the mean.
std::vector<double> rescale_strengths(std::span<const double> raw_sums,
                                      GoalStats target, double epsilon = 0.05);

// Win/draw/loss split of the difference of two independent Poisson counts,
// by truncated double summation (neglected tail < 1e-12).
OutcomeForecast skellam_probs(double lambda_home, double lambda_away);

// Mean negative log-likelihood; probabilities are floored at 1e-15 and the
// floor count is reported through `clamped` when given.
double log_loss(std::span<const OutcomeForecast> forecasts,
                std::span<const MatchOutcome> observed,
                std::size_t* clamped = nullptr);

OutcomeForecast baseline_prior();

struct ForecastRow {
  std::int64_t game_id = 0;
  OutcomeForecast forecast;
  MatchOutcome observed = MatchOutcome::Draw;
  double nll = 0.0;
};

struct ForecastReport {
  std::vector<ForecastRow> rows;
  double log_loss = 0.0;
  std::size_t excluded_games = 0;
  std::size_t clamped = 0;
};

// Full forecasting pass: per-game team strengths, joint rescaling to the
// goal distribution, Skellam outcome probabilities, scored by log loss.
ForecastReport forecast_games(std::span<const Fixture> games,
                              std::span<const Lineup> lineups,
                              const StrengthInputs& inputs, GoalStats target);

std::string forecast_report_to_csv(const ForecastReport& report);

}  // namespace passval
