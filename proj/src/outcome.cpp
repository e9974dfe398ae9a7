#include "passval/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "passval/csv.hpp"

namespace passval {

std::string_view to_string(MatchOutcome o) {
  switch (o) {
    case MatchOutcome::HomeWin: return "home";
    case MatchOutcome::Draw: return "draw";
    case MatchOutcome::AwayWin: return "away";
  }
  return "draw";
}

MatchOutcome outcome_of(const Fixture& f) {
  if (f.home_goals > f.away_goals) return MatchOutcome::HomeWin;
  if (f.home_goals < f.away_goals) return MatchOutcome::AwayWin;
  return MatchOutcome::Draw;
}

GoalStats goal_stats(std::span<const Fixture> calibration) {
  if (calibration.empty()) {
    throw ValidationError("goal_stats: no calibration games");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  const double n = 2.0 * static_cast<double>(calibration.size());
  for (const Fixture& f : calibration) {
    sum += f.home_goals + f.away_goals;
    sum_sq += static_cast<double>(f.home_goals) * f.home_goals +
              static_cast<double>(f.away_goals) * f.away_goals;
  }
  GoalStats stats;
  stats.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - stats.mean * stats.mean);
  stats.stddev = std::sqrt(var);
  return stats;
}

StrengthInputs strength_inputs(std::span<const PlayerRating> ratings,
                               StrengthMetric metric) {
  StrengthInputs inputs;
  std::map<std::pair<std::int64_t, Position>, std::pair<double, int>> acc;
  for (const PlayerRating& r : ratings) {
    const double v = metric == StrengthMetric::ContributionP90
                         ? r.contribution_p90
                         : r.pass_accuracy;
    inputs.player_metric[r.player_id] = v;
    auto& [sum, count] = acc[{r.team_id, r.position}];
    sum += v;
    count += 1;
  }
  for (const auto& [key, sc] : acc) {
    inputs.line_average[key] = sc.first / sc.second;
  }
  return inputs;
}

std::optional<double> team_strength(std::span<const Lineup> starters,
                                    const StrengthInputs& inputs) {
  double sum = 0.0;
  for (const Lineup& l : starters) {
    auto it = inputs.player_metric.find(l.player_id);
    if (it != inputs.player_metric.end()) {
      sum += it->second;
      continue;
    }
    auto avg = inputs.line_average.find({l.team_id, l.position});
    if (avg == inputs.line_average.end()) {
      return std::nullopt;  // no rated player in this line: exclude the game
    }
    sum += avg->second;
  }
  return sum;
}

std::vector<double> rescale_strengths(std::span<const double> raw_sums,
                                      GoalStats target, double epsilon) {
  if (raw_sums.size() < 2) {
    throw ValidationError("rescale_strengths: need at least two values");
  }
  double mean = 0.0;
  for (double v : raw_sums) mean += v;
  mean /= static_cast<double>(raw_sums.size());
  double var = 0.0;
  for (double v : raw_sums) var += (v - mean) * (v - mean);
  var /= static_cast<double>(raw_sums.size());
  const double sd = std::sqrt(var);

  std::vector<double> out(raw_sums.size());
  // Rounding can leave a constant input with a subnormal spread.
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
    std::fill(out.begin(), out.end(), std::max(epsilon, target.mean));
    return out;
  }
  const double scale = target.stddev / sd;
  for (std::size_t i = 0; i < raw_sums.size(); ++i) {
    out[i] = std::max(epsilon, target.mean + scale * (raw_sums[i] - mean));
  }
  return out;
}

OutcomeForecast skellam_probs(double lambda_home, double lambda_away) {
  if (!(lambda_home > 0.0) || !(lambda_away > 0.0)) {
    throw ValidationError("skellam_probs: lambdas must be positive");
  }
  // Truncate where both Poisson tails are below 1e-13; the neglected
  // probability mass is then under 1e-12.
  auto pmf = [](double lambda) {
    std::vector<double> p;
    p.push_back(std::exp(-lambda));
    double cum = p[0];
    for (int k = 1;; ++k) {
      p.push_back(p.back() * lambda / k);
      cum += p.back();
      if (cum >= 1.0 - 1e-13 && k > lambda) break;
      if (k > 2000) break;
    }
    return p;
  };
  const std::vector<double> ph = pmf(lambda_home);
  const std::vector<double> pa = pmf(lambda_away);

  std::vector<double> ca(pa.size());  // prefix cumulative of away counts
  double run = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    run += pa[k];
    ca[k] = run;
  }
  std::vector<double> ch(ph.size());
  run = 0.0;
  for (std::size_t k = 0; k < ph.size(); ++k) {
    run += ph[k];
    ch[k] = run;
  }

  OutcomeForecast f;
  for (std::size_t k = 0; k < ph.size(); ++k) {
    if (k < pa.size()) f.p_draw += ph[k] * pa[k];
    if (k >= 1) {
      const std::size_t cap = std::min(k - 1, pa.size() - 1);
      f.p_home += ph[k] * ca[cap];
    }
  }
  for (std::size_t k = 1; k < pa.size(); ++k) {
    const std::size_t cap = std::min(k - 1, ph.size() - 1);
    f.p_away += pa[k] * ch[cap];
  }
  return f;
}

double log_loss(std::span<const OutcomeForecast> forecasts,
                std::span<const MatchOutcome> observed,
                std::size_t* clamped) {
  if (forecasts.size() != observed.size() || forecasts.empty()) {
    throw ValidationError("log_loss: forecast/outcome size mismatch");
  }
  double sum = 0.0;
  std::size_t floored = 0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    double p = 0.0;
    switch (observed[i]) {
      case MatchOutcome::HomeWin: p = forecasts[i].p_home; break;
      case MatchOutcome::Draw: p = forecasts[i].p_draw; break;
      case MatchOutcome::AwayWin: p = forecasts[i].p_away; break;
    }
    if (p < 1e-15) {
      p = 1e-15;
      ++floored;
    }
    sum += -std::log(p);
  }
  if (clamped) *clamped = floored;
  return sum / static_cast<double>(forecasts.size());
}

OutcomeForecast baseline_prior() {
  return OutcomeForecast{0.4842, 0.2342, 0.2816};
}

ForecastReport forecast_games(std::span<const Fixture> games,
                              std::span<const Lineup> lineups,
                              const StrengthInputs& inputs, GoalStats target) {
  // Starters per (game, team): lineup entries that begin at minute 0.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<Lineup>> starters;
  for (const Lineup& l : lineups) {
    if (l.minute_on == 0.0) starters[{l.game_id, l.team_id}].push_back(l);
  }

  struct Pending {
    std::int64_t game_id;
    MatchOutcome observed;
    double raw_home;
    double raw_away;
  };
  std::vector<Pending> pending;
  ForecastReport report;
  for (const Fixture& f : games) {
    auto hit = starters.find({f.game_id, f.home_team});
    auto ait = starters.find({f.game_id, f.away_team});
    if (hit == starters.end() || ait == starters.end()) {
      ++report.excluded_games;
      continue;
    }
    auto home = team_strength(hit->second, inputs);
    auto away = team_strength(ait->second, inputs);
    if (!home || !away) {
      ++report.excluded_games;
      continue;
    }
    pending.push_back(Pending{f.game_id, outcome_of(f), *home, *away});
  }
  if (pending.empty()) return report;

  std::vector<double> raw;
  raw.reserve(pending.size() * 2);
  for (const Pending& p : pending) {
    raw.push_back(p.raw_home);
    raw.push_back(p.raw_away);
  }
  std::vector<double> lambdas;
  if (raw.size() >= 2) {
    lambdas = rescale_strengths(raw, target);
  } else {
    lambdas.assign(raw.size(), std::max(0.05, target.mean));
  }

  std::vector<OutcomeForecast> forecasts;
  std::vector<MatchOutcome> observed;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const OutcomeForecast f = skellam_probs(lambdas[2 * i], lambdas[2 * i + 1]);
    forecasts.push_back(f);
    observed.push_back(pending[i].observed);
  }
  report.log_loss = log_loss(forecasts, observed, &report.clamped);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    double p = 0.0;
    switch (observed[i]) {
      case MatchOutcome::HomeWin: p = forecasts[i].p_home; break;
      case MatchOutcome::Draw: p = forecasts[i].p_draw; break;
      case MatchOutcome::AwayWin: p = forecasts[i].p_away; break;
    }
    report.rows.push_back(ForecastRow{pending[i].game_id, forecasts[i],
                                      observed[i],
                                      -std::log(std::max(p, 1e-15))});
  }
  return report;
}

std::string forecast_report_to_csv(const ForecastReport& report) {
  std::ostringstream os;
  os << "game_id,p_home,p_draw,p_away,observed,neg_log_likelihood\n";
  for (const ForecastRow& row : report.rows) {
    os << row.game_id << ',' << csv::fmt(row.forecast.p_home) << ','
       << csv::fmt(row.forecast.p_draw) << ',' << csv::fmt(row.forecast.p_away)
       << ',' << to_string(row.observed) << ',' << csv::fmt(row.nll) << '\n';
  }
  return os.str();
}

}  // namespace passval
