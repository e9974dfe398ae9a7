#include "passval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "passval/csv.hpp"
#include "passval/rng.hpp"

namespace passval::synth {

namespace {

constexpr double kHalfMinutes = 45.0;

double round2(double v) { return std::round(v * 100.0) / 100.0; }
double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

PitchPoint mirror(PitchPoint p) {
  return PitchPoint{kPitchLength - p.x, kPitchWidth - p.y};
}

PitchPoint clamp_pitch(double x, double y) {
  return PitchPoint{std::clamp(x, 0.0, kPitchLength),
                    std::clamp(y, 0.0, kPitchWidth)};
}

// yyyy-mm-dd from days since the epoch (Gregorian, proleptic).
std::string civil_date(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = y + (m <= 2);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(year), m, d);
  return buf;
}

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
      static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 +
         static_cast<std::int64_t>(doe) - 719468;
}

struct Player {
  std::int64_t id = 0;
  std::int64_t team = 0;
  Position position = Position::MF;
  double skill = 0.0;
  bool starter = false;
  std::string birth_date;
};

struct Roster {
  std::vector<Player> players;  // grouped by team, 14 per team
  std::vector<std::vector<std::size_t>> by_team;
};

Position slot_position(int slot) {
  if (slot == 0) return Position::GK;
  if (slot <= 4 || slot == 11) return Position::DF;
  if (slot <= 8 || slot == 12) return Position::MF;
  return Position::FW;  // slots 9, 10, 13
}

Roster make_roster(const SynthConfig& cfg, Rng& rng) {
  Roster roster;
  roster.by_team.resize(static_cast<std::size_t>(cfg.n_teams));
  for (int t = 0; t < cfg.n_teams; ++t) {
    const double bias = rng.uniform(-cfg.team_bias, cfg.team_bias);
    for (int slot = 0; slot < 14; ++slot) {
      Player p;
      p.team = t + 1;
      p.id = p.team * 1000 + slot + 1;
      p.position = slot_position(slot);
      p.skill = std::clamp(
          rng.uniform(-cfg.skill_spread, cfg.skill_spread) + bias, -1.2, 1.2);
      p.starter = slot < 11;
      // Spread birth dates across 1984-2000 so age filters bite.
      const std::int64_t base = days_from_civil(1984, 1, 1);
      p.birth_date = civil_date(base + static_cast<std::int64_t>(
                                           rng.below(16 * 365)));
      roster.by_team[static_cast<std::size_t>(t)].push_back(
          roster.players.size());
      roster.players.push_back(std::move(p));
    }
  }
  return roster;
}

enum class Restart { None, KickOff, Corner, FreeKick, GoalKick, ThrowIn };

struct RawRow {
  std::int64_t game;
  int half;
  double time;
  std::int64_t team;
  std::int64_t player;
  int type;
  int subtype;
  double sx, ex, sy, ey;  // percent
};

struct GameSim {
  const SynthConfig& cfg;
  Rng& rng;
  const Roster& roster;
  std::int64_t game_id;
  std::array<std::int64_t, 2> team{};  // 0 = home, 1 = away
  std::vector<RawRow>& rows;
  std::vector<Lineup>& lineups;
  std::array<int, 2> goals{};

  std::array<std::vector<std::size_t>, 2> on_pitch;  // roster indices
  int half = 1;
  double t = 0.0;
  int poss = 0;                      // side in possession
  PitchPoint ball{52.5, 34.0};       // acting team's attacking frame
  Restart restart = Restart::KickOff;
  std::size_t current = 0;           // roster index of the player on the ball

  GameSim(const SynthConfig& c, Rng& r, const Roster& ro, std::int64_t id,
          std::int64_t home, std::int64_t away, std::vector<RawRow>& out_rows,
          std::vector<Lineup>& out_lineups)
      : cfg(c), rng(r), roster(ro), game_id(id), rows(out_rows),
        lineups(out_lineups) {
    team = {home, away};
  }

  const Player& player(std::size_t roster_idx) const {
    return roster.players[roster_idx];
  }

  std::size_t pick_on_pitch(int side, bool allow_gk) {
    const auto& pool = on_pitch[static_cast<std::size_t>(side)];
    for (;;) {
      std::size_t idx = pool[rng.below(pool.size())];
      if (allow_gk || player(idx).position != Position::GK) return idx;
    }
  }

  std::size_t pick_receiver(int side, std::size_t passer) {
    for (;;) {
      std::size_t idx = pick_on_pitch(side, false);
      if (idx != passer) return idx;
    }
  }

  void emit(int side, std::size_t roster_idx, int type, int subtype,
            PitchPoint from, PitchPoint to) {
    // Coordinates are written in the acting team's attacking frame, which is
    // exactly the provider's normalized convention.
    rows.push_back(RawRow{game_id, half, round3(t), team[static_cast<std::size_t>(side)],
                          player(roster_idx).id, type, subtype,
                          round2(from.x * 100.0 / kPitchLength),
                          round2(to.x * 100.0 / kPitchLength),
                          round2(from.y * 100.0 / kPitchWidth),
                          round2(to.y * 100.0 / kPitchWidth)});
  }

  void flip_possession(PitchPoint new_frame_ball) {
    poss = 1 - poss;
    ball = new_frame_ball;
    current = pick_on_pitch(poss, false);
  }

  void after_goal(int scoring_side) {
    goals[static_cast<std::size_t>(scoring_side)] += 1;
    poss = 1 - scoring_side;
    ball = PitchPoint{52.5, 34.0};
    restart = Restart::KickOff;
    current = pick_on_pitch(poss, false);
  }

  void take_shot() {
    const double xg = true_xg(ball);
    const bool scored = rng.uniform() < xg;
    emit(poss, current, 10, scored ? 101 : 100, ball, kGoalCenter);
    if (scored) {
      after_goal(poss);
      return;
    }
    const double r = rng.uniform();
    if (r < 0.55) {
      // Wide or over: ball out behind the goal, defenders restart.
      emit(1 - poss, pick_on_pitch(1 - poss, true), 5, 50,
           mirror(ball), mirror(ball));
      flip_possession(PitchPoint{5.5, 34.0});
      restart = Restart::GoalKick;
    } else if (r < 0.80) {
      // Keeper gathers.
      flip_possession(mirror(ball));
      restart = Restart::None;
    } else {
      // Rebound stays with the attack; a fresh possession starts.
      restart = Restart::None;
    }
  }

  void take_penalty() {
    const std::size_t taker = current;
    const PitchPoint spot{kPitchLength - 11.0, 34.0};
    const bool scored = rng.uniform() < cfg.penalty_conversion;
    emit(poss, taker, 10, scored ? 111 : 110, spot, kGoalCenter);
    if (scored) {
      after_goal(poss);
    } else {
      emit(1 - poss, pick_on_pitch(1 - poss, true), 5, 50, mirror(spot),
           mirror(spot));
      flip_possession(PitchPoint{5.5, 34.0});
      restart = Restart::GoalKick;
    }
  }

  // Shared pass mechanics. Returns true when the ball stays with the team.
  void attempt_pass(int type, int subtype, PitchPoint target,
                    double success_bonus) {
    const Player& passer = player(current);
    const double length = std::hypot(target.x - ball.x, target.y - ball.y);
    const double logit = cfg.succ_base - cfg.succ_len_coef * length +
                         cfg.succ_skill_coef * passer.skill + success_bonus;
    const bool success = rng.uniform() < sigmoid(logit);

    if (type == 8) {
      // Pick the open-play subtype from geometry.
      const bool wide = ball.y < 14.0 || ball.y > 54.0;
      if (ball.x > 72.0 && wide && target.x > 88.0 && target.y > 13.0 &&
          target.y < 55.0) {
        subtype = 80;
      } else if (length > 32.0) {
        subtype = 83;
      }
    }
    emit(poss, current, type, subtype, ball, target);

    if (success) {
      const double forward = target.x - ball.x;
      ball = target;
      current = pick_receiver(poss, current);
      // Long completions into the final third occasionally come back as
      // offside calls against the passing team.
      if (forward > 14.0 && target.x > 72.0 &&
          rng.uniform() < cfg.offside_rate) {
        emit(poss, current, 2, 22, ball, ball);
        flip_possession(mirror(ball));
        restart = Restart::FreeKick;
        return;
      }
      if (rng.uniform() > cfg.possession_continue) {
        // Unrecorded duel loses the ball.
        flip_possession(mirror(ball));
        restart = Restart::None;
      }
      return;
    }

    // Failed pass: deflected out, sailed out, or intercepted.
    const double r = rng.uniform();
    if (r < 0.20) {
      emit(1 - poss, pick_on_pitch(1 - poss, true), 5, 50, mirror(target),
           mirror(target));
      if (target.x > 88.0) {
        restart = Restart::Corner;
        ball = PitchPoint{kPitchLength - 0.5, target.y < 34.0 ? 0.5 : 67.5};
      } else {
        restart = Restart::ThrowIn;
        ball = PitchPoint{target.x, target.y < 34.0 ? 0.5 : 67.5};
      }
      current = pick_on_pitch(poss, false);
    } else if (r < 0.40) {
      emit(poss, current, 5, 50, target, target);
      const PitchPoint landing = mirror(target);
      flip_possession(landing);
      if (landing.x < 2.0) {
        restart = Restart::GoalKick;
        ball = PitchPoint{5.5, 34.0};
      } else {
        restart = Restart::ThrowIn;
        ball = PitchPoint{landing.x, landing.y < 34.0 ? 0.5 : 67.5};
      }
    } else {
      flip_possession(mirror(target));
      restart = Restart::None;
    }
  }

  void take_restart() {
    const Restart kind = restart;
    restart = Restart::None;
    switch (kind) {
      case Restart::KickOff: {
        current = pick_on_pitch(poss, false);
        ball = PitchPoint{52.5, 34.0};
        const PitchPoint target = clamp_pitch(ball.x + rng.normal(-4.0, 2.0),
                                              ball.y + rng.normal(0.0, 4.0));
        attempt_pass(8, 85, target, 2.0);
        return;
      }
      case Restart::GoalKick: {
        // The keeper launches long.
        for (std::size_t idx : on_pitch[static_cast<std::size_t>(poss)]) {
          if (player(idx).position == Position::GK) current = idx;
        }
        ball = PitchPoint{5.5, 34.0};
        const PitchPoint target = clamp_pitch(ball.x + std::abs(rng.normal(32.0, 10.0)),
                                              ball.y + rng.normal(0.0, 14.0));
        attempt_pass(3, 34, target, 0.4);
        return;
      }
      case Restart::Corner: {
        current = pick_on_pitch(poss, false);
        const PitchPoint target =
            clamp_pitch(kPitchLength - std::abs(rng.normal(7.0, 3.0)),
                        34.0 + rng.normal(0.0, 6.0));
        attempt_pass(3, 30, target, -0.6);
        return;
      }
      case Restart::FreeKick: {
        current = pick_on_pitch(poss, false);
        const PitchPoint target = clamp_pitch(ball.x + rng.normal(8.0, 8.0),
                                              ball.y + rng.normal(0.0, 9.0));
        attempt_pass(3, 31, target, 0.3);
        return;
      }
      case Restart::ThrowIn: {
        current = pick_on_pitch(poss, false);
        const PitchPoint target = clamp_pitch(
            ball.x + rng.normal(2.0, 5.0),
            ball.y < 34.0 ? ball.y + std::abs(rng.normal(6.0, 3.0))
                          : ball.y - std::abs(rng.normal(6.0, 3.0)));
        // Throw-ins move the ball by hand; mostly retained.
        emit(poss, current, 3, 36, ball, target);
        if (rng.uniform() < 0.92) {
          ball = target;
          current = pick_receiver(poss, current);
        } else {
          flip_possession(mirror(target));
        }
        return;
      }
      case Restart::None:
        return;
    }
  }

  void open_play_action() {
    // Defensive fouls interrupt before the ball moves.
    if (rng.uniform() < cfg.foul_rate) {
      const bool in_box =
          ball.x >= 88.5 && ball.y >= 13.84 && ball.y <= 54.16;
      emit(1 - poss, pick_on_pitch(1 - poss, false), 2, 20, mirror(ball),
           mirror(ball));
      if (in_box) {
        take_penalty();
      } else {
        restart = Restart::FreeKick;  // same team keeps the ball
      }
      return;
    }

    const double xg = true_xg(ball);
    if (ball.x > 55.0 &&
        rng.uniform() < std::min(cfg.shot_cap, cfg.shot_scale * xg)) {
      take_shot();
      return;
    }

    if (rng.uniform() < cfg.dribble_share) {
      const PitchPoint target = clamp_pitch(ball.x + rng.normal(2.5, 2.5),
                                            ball.y + rng.normal(0.0, 3.0));
      emit(poss, current, 1, 70, ball, target);
      if (rng.uniform() < cfg.dribble_loss) {
        flip_possession(mirror(target));
      } else {
        ball = target;
      }
      return;
    }

    const Player& passer = player(current);
    const PitchPoint target = clamp_pitch(
        ball.x + rng.normal(cfg.pass_fwd_base + cfg.pass_skill_gain * passer.skill,
                            cfg.pass_sigma_x),
        ball.y + rng.normal(0.0, cfg.pass_sigma_y));
    attempt_pass(8, 85, target, 0.0);
  }

  void plan_lineups_and_subs(
      std::array<std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>>, 2>&
          subs) {
    for (int side = 0; side < 2; ++side) {
      const auto& squad =
          roster.by_team[static_cast<std::size_t>(team[static_cast<std::size_t>(side)] - 1)];
      auto& pitch = on_pitch[static_cast<std::size_t>(side)];
      pitch.assign(squad.begin(), squad.begin() + 11);
      const std::size_t n_subs = rng.below(3);
      std::array<double, 3> used_out{};
      for (std::size_t s = 0; s < n_subs; ++s) {
        const double minute = std::floor(rng.uniform(55.0, 84.0));
        const std::size_t out_slot = 1 + rng.below(10);  // never the keeper
        const std::size_t bench_slot = 11 + s;
        bool duplicate = false;
        for (std::size_t q = 0; q < s; ++q) {
          if (used_out[q] == static_cast<double>(out_slot)) duplicate = true;
        }
        if (duplicate) continue;
        used_out[s] = static_cast<double>(out_slot);
        subs[static_cast<std::size_t>(side)].push_back(
            {minute, {squad[out_slot], squad[bench_slot]}});
      }
      std::sort(subs[static_cast<std::size_t>(side)].begin(),
                subs[static_cast<std::size_t>(side)].end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      for (std::size_t slot = 0; slot < 11; ++slot) {
        double off = 2.0 * kHalfMinutes;
        for (const auto& [minute, pair] : subs[static_cast<std::size_t>(side)]) {
          if (pair.first == squad[slot]) off = minute;
        }
        const Player& p = player(squad[slot]);
        lineups.push_back(Lineup{game_id, p.id, p.team, p.position, 0.0, off});
      }
      for (const auto& [minute, pair] : subs[static_cast<std::size_t>(side)]) {
        const Player& p = player(pair.second);
        lineups.push_back(
            Lineup{game_id, p.id, p.team, p.position, minute, 2.0 * kHalfMinutes});
      }
    }
  }

  void run() {
    std::array<std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>>, 2>
        subs;
    plan_lineups_and_subs(subs);
    std::array<std::size_t, 2> next_sub{0, 0};

    for (half = 1; half <= 2; ++half) {
      t = 0.0;
      poss = half == 1 ? 0 : 1;
      restart = Restart::KickOff;
      ball = PitchPoint{52.5, 34.0};
      current = pick_on_pitch(poss, false);
      for (;;) {
        t += rng.uniform(cfg.min_gap, cfg.max_gap);
        if (t >= cfg.half_seconds) break;
        const double minute =
            (half - 1) * kHalfMinutes + t / cfg.half_seconds * kHalfMinutes;
        for (int side = 0; side < 2; ++side) {
          auto& queue = subs[static_cast<std::size_t>(side)];
          auto& cursor = next_sub[static_cast<std::size_t>(side)];
          while (cursor < queue.size() && queue[cursor].first <= minute) {
            auto [out_idx, in_idx] = queue[cursor].second;
            auto& pitch = on_pitch[static_cast<std::size_t>(side)];
            std::replace(pitch.begin(), pitch.end(), out_idx, in_idx);
            if (current == out_idx) current = in_idx;
            ++cursor;
          }
        }
        if (restart != Restart::None) {
          take_restart();
        } else {
          open_play_action();
        }
      }
    }
  }
};

}  // namespace

void SynthConfig::validate() const {
  if (n_games < 0) throw ConfigError("synth: n_games must be >= 0");
  if (n_teams < 2) throw ConfigError("synth: need at least two teams");
  if (!(half_seconds > 30.0)) throw ConfigError("synth: half too short");
  if (!(min_gap > 0.0 && min_gap <= max_gap)) {
    throw ConfigError("synth: event gap bounds invalid");
  }
  const double probs[] = {possession_continue, dribble_share, dribble_loss,
                          shot_cap,            foul_rate,     offside_rate,
                          penalty_conversion};
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("synth: probability parameter outside [0,1]");
    }
  }
  if (!(shot_scale >= 0.0) || !(skill_spread >= 0.0) || !(team_bias >= 0.0)) {
    throw ConfigError("synth: negative scale parameter");
  }
}

double true_xg(PitchPoint p) {
  const ShotFeatures f = shot_features_at(p);
  return sigmoid(-0.22 * f.dist + 1.4 * f.angle);
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed == 0 ? 0x9e3779b97f4a7c15ull : cfg.seed);
  const Roster roster = make_roster(cfg, rng);

  std::vector<RawRow> rows;
  std::vector<Lineup> lineups;
  std::vector<Fixture> fixtures;

  const std::int64_t first_day = days_from_civil(2014, 8, 1);
  for (int g = 1; g <= cfg.n_games; ++g) {
    const int home = (g - 1) % cfg.n_teams;
    const int away =
        (home + 1 + ((g - 1) / cfg.n_teams) % (cfg.n_teams - 1)) % cfg.n_teams;
    GameSim sim(cfg, rng, roster, g, home + 1, away + 1, rows, lineups);
    sim.run();
    fixtures.push_back(Fixture{g, home + 1, away + 1, sim.goals[0],
                               sim.goals[1], civil_date(first_day + 2 * (g - 1))});
  }

  SynthData data;
  {
    std::ostringstream os;
    os << "game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y\n";
    for (const RawRow& r : rows) {
      os << r.game << ',' << r.half << ',' << csv::fmt(r.time) << ',' << r.team
         << ',' << r.player << ',' << r.type << ',' << r.subtype << ','
         << csv::fmt(r.sx) << ',' << csv::fmt(r.ex) << ',' << csv::fmt(r.sy)
         << ',' << csv::fmt(r.ey) << '\n';
    }
    data.events_csv = os.str();
  }
  data.lineups_csv = lineups_to_csv(lineups);
  {
    std::vector<PlayerInfo> infos;
    for (const auto& p : roster.players) {
      infos.push_back(PlayerInfo{p.id, "Player_" + std::to_string(p.id),
                                 p.birth_date, p.team});
    }
    data.players_csv = players_to_csv(infos);
  }
  data.fixtures_csv = fixtures_to_csv(fixtures);
  {
    std::ostringstream os;
    os << "player_id,skill\n";
    for (const auto& p : roster.players) {
      os << p.id << ',' << csv::fmt(p.skill) << '\n';
      data.planted_skill[p.id] = p.skill;
    }
    data.truth_csv = os.str();
  }
  return data;
}

void write_files(const SynthData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << content;
  };
  write("events.csv", data.events_csv);
  write("lineups.csv", data.lineups_csv);
  write("players.csv", data.players_csv);
  write("fixtures.csv", data.fixtures_csv);
  write("truth.csv", data.truth_csv);
}

std::vector<LabeledShot> sample_labeled_shots(std::size_t n,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledShot> shots;
  shots.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PitchPoint p = clamp_pitch(
        kPitchLength - std::abs(rng.normal(0.0, 18.0)),
        34.0 + rng.normal(0.0, 12.0));
    const double xg = true_xg(p);
    shots.push_back(LabeledShot{shot_features_at(p), rng.uniform() < xg});
  }
  return shots;
}

}  // namespace passval::synth
