#include "finger/games.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace finger::games {

FingerSet fingers_for_lane(Lane lane) {
  switch (lane) {
    case Lane::top: return {true, false};
    case Lane::bottom: return {false, true};
    case Lane::middle: return {true, true};
  }
  return {};
}

Judgement judge_note(const NoteSpec& note,
                     const std::optional<std::pair<FingerSet, double>>& movement,
                     double window) {
  if (window <= 0) throw std::invalid_argument("judge_note: window must be positive");
  if (!movement || movement->first != note.required_fingers)
    return {JudgeCategory::miss, 0.0};
  const double err = movement->second - note.hit_time;
  if (std::abs(err) <= window) return {JudgeCategory::hit, err};
  return {err < 0 ? JudgeCategory::early : JudgeCategory::late, err};
}

std::pair<PongState, PongEvent> step_pong(const PongState& s, double dt,
                                          double paddle_input) {
  if (dt <= 0) throw std::invalid_argument("step_pong: dt must be positive");
  PongState n = s;
  n.paddle_y = std::clamp(paddle_input, 0.0, 1.0);
  n.ball_x += n.ball_vx * dt;
  n.ball_y += n.ball_vy * dt;
  // reflecting top/bottom walls
  if (n.ball_y > 1.0) {
    n.ball_y = 2.0 - n.ball_y;
    n.ball_vy = -n.ball_vy;
  } else if (n.ball_y < 0.0) {
    n.ball_y = -n.ball_y;
    n.ball_vy = -n.ball_vy;
  }
  PongEvent ev = PongEvent::none;
  if (n.ball_x <= 0.0 && n.ball_vx < 0.0) {
    n.ball_x = -n.ball_x;
    if (std::abs(n.paddle_y - n.ball_y) <= n.paddle_half_height) {
      ev = PongEvent::player_hit;
      n.ball_vx = -n.ball_vx;
    } else {
      ev = PongEvent::player_miss;
    }
  } else if (n.ball_x >= 1.0 && n.ball_vx > 0.0) {
    n.ball_x = 2.0 - n.ball_x;
    if (n.mode == PongPlay::target) {
      ev = std::abs(n.ball_y - n.target_y) <= n.paddle_half_height
               ? PongEvent::target_hit
               : PongEvent::target_miss;
    }
    n.ball_vx = -n.ball_vx;  // rally opponent always returns
  }
  return {n, ev};
}

double propriopixel_note_cue(Lane lane) {
  switch (lane) {
    case Lane::top: return 1.0;
    case Lane::bottom: return 0.0;
    case Lane::middle: return 0.5;
  }
  return 0.5;
}

double propriopixel_ball_cue(double ball_y, const core::Workspace& ws) {
  if (ball_y < 0.0 || ball_y > 1.0)
    throw std::invalid_argument("propriopixel_ball_cue: ball_y outside [0,1]");
  return ws.max_deg - ball_y * ws.span();
}

Song generate_song(int lanes_used, int n_notes, core::SeededRng& content_rng,
                   double notes_per_second) {
  if (lanes_used != 2 && lanes_used != 3)
    throw std::invalid_argument("generate_song: lanes_used must be 2 or 3");
  Song song;
  song.lanes_used = lanes_used;
  song.notes.reserve(n_notes);
  double t = 2.0;
  const double mean_gap = 1.0 / notes_per_second;
  for (int i = 0; i < n_notes; ++i) {
    t += content_rng.uniform(0.6 * mean_gap, 1.4 * mean_gap);
    Lane lane;
    if (lanes_used == 2) {
      lane = content_rng.uniform() < 0.5 ? Lane::top : Lane::bottom;
    } else {
      const auto r = content_rng.uniform_int(0, 2);
      lane = r == 0 ? Lane::top : (r == 1 ? Lane::middle : Lane::bottom);
    }
    song.notes.push_back({t, lane, fingers_for_lane(lane)});
  }
  return song;
}

std::vector<PongServe> generate_serves(int n_balls, core::SeededRng& content_rng) {
  std::vector<PongServe> serves;
  serves.reserve(n_balls);
  for (int i = 0; i < n_balls; ++i) {
    serves.push_back({content_rng.uniform(0.2, 0.8),
                      content_rng.uniform(-0.5, 0.5)});
  }
  return serves;
}

namespace {

void check_mode(GameMode mode, const assist::AssistState& st) {
  const bool virt = mode == GameMode::virtual_amp;
  const bool assist_virt = st.mode == assist::Mode::virtual_amp;
  if (virt != assist_virt && st.mode != assist::Mode::none)
    throw std::invalid_argument("run_game: game mode and assist mode disagree");
}

double rehabhero_difficulty(const assist::DifficultyState& d) {
  return 0.20 / d.timing_window - 1.0;
}

double pong_difficulty(const assist::DifficultyState& d) {
  return (d.ball_speed_scale - 1.0) + 2.0 * (1.0 - d.paddle_scale);
}

}  // namespace

GameResult run_rehabhero(GameMode mode, const Song& song,
                         const patient::PatientProfile& profile,
                         assist::AssistState assist_state,
                         const assist::DifficultyState& difficulty,
                         bool tuning_enabled, core::SeededRng& rng) {
  check_mode(mode, assist_state);
  GameResult res;
  const double window = difficulty.timing_window;
  const double diff = rehabhero_difficulty(difficulty);
  int hits = 0, idx = 0;
  for (const auto& note : song.notes) {
    assist::Channel ch;
    ch.finger = note.lane == Lane::bottom ? assist::Channel::Finger::middle
                                          : assist::Channel::Finger::index;
    ch.direction = (idx % 2 == 0) ? assist::Channel::Direction::flexion
                                  : assist::Channel::Direction::extension;
    const double gain_before = assist::channel_gain(assist_state, ch);
    const auto ev = patient::respond_to_note(note.hit_time, window, profile,
                                             gain_before, diff, rng);
    std::optional<std::pair<FingerSet, double>> movement;
    if (ev.moved) movement = {note.required_fingers, ev.press_time};
    const Judgement j = judge_note(note, movement, window);
    const bool ok = j.category == JudgeCategory::hit;
    if (ok) ++hits;
    if (tuning_enabled) {
      assist_state = assist::update_gain(
          assist_state, ok ? assist::Outcome::success : assist::Outcome::failure, ch);
    }
    res.records.push_back({idx, j, gain_before,
                           assist::channel_gain(assist_state, ch), ch});
    ++idx;
  }
  res.success_rate = song.notes.empty() ? 0.0
                                        : static_cast<double>(hits) / song.notes.size();
  res.assist = std::move(assist_state);
  return res;
}

GameResult run_fingerpong(GameMode mode, PongPlay play,
                          const std::vector<PongServe>& serves,
                          const patient::PatientProfile& profile,
                          assist::AssistState assist_state,
                          const assist::DifficultyState& difficulty,
                          bool tuning_enabled, core::SeededRng& rng) {
  check_mode(mode, assist_state);
  GameResult res;
  const double diff = pong_difficulty(difficulty);
  const double dt = 1.0 / 120.0;
  const double speed = 0.5 * difficulty.ball_speed_scale;
  const double half = 0.1 * difficulty.paddle_scale;
  int hits = 0, idx = 0;
  for (const auto& serve : serves) {
    const double gain_before = assist_state.gain;
    const double p = patient::success_probability(profile, gain_before, diff);
    const bool success_draw = rng.uniform() < p;
    // paddle tracks the ball with an offset; failures sit just outside reach
    const double offset =
        success_draw ? 0.0
                     : (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                           half * (1.1 + 0.5 * std::abs(rng.normal()));

    PongState st;
    st.ball_x = 1.0;
    st.ball_y = serve.start_y;
    st.ball_vx = -speed * std::cos(serve.angle);
    st.ball_vy = speed * std::sin(serve.angle);
    st.paddle_half_height = half;
    st.mode = play;

    bool ball_resolved = false;
    bool success = false;
    double t = 0.0;
    while (!ball_resolved && t < 20.0) {
      auto [next, ev] = step_pong(st, dt, st.ball_y + offset);
      st = next;
      t += dt;
      switch (ev) {
        case PongEvent::player_hit:
          if (play == PongPlay::rally) {
            success = true;
            ball_resolved = true;
          } else {
            // aim the return: hit the target when the draw succeeded,
            // otherwise overshoot it
            const double aim_y = success_draw
                                     ? serve.start_y
                                     : serve.start_y + 2.5 * half *
                                           (serve.start_y < 0.5 ? 1.0 : -1.0);
            st.target_y = serve.start_y;
            st.ball_vy = (aim_y - st.ball_y) * st.ball_vx;
          }
          break;
        case PongEvent::player_miss:
          ball_resolved = true;
          break;
        case PongEvent::target_hit:
          success = true;
          ball_resolved = true;
          break;
        case PongEvent::target_miss:
          ball_resolved = true;
          break;
        case PongEvent::none:
          break;
      }
    }
    if (success) ++hits;
    if (tuning_enabled) {
      assist_state = assist::update_gain(
          assist_state, success ? assist::Outcome::success : assist::Outcome::failure);
    }
    Judgement j{success ? JudgeCategory::hit : JudgeCategory::miss, 0.0};
    res.records.push_back({idx, j, gain_before, assist_state.gain, {}});
    ++idx;
  }
  res.success_rate = serves.empty() ? 0.0 : static_cast<double>(hits) / serves.size();
  res.assist = std::move(assist_state);
  return res;
}

SessionRecord run_session(const SessionPlan& plan, GameMode mode,
                          const patient::PatientProfile& profile,
                          assist::AssistState assist_state,
                          assist::DifficultyState difficulty,
                          int session_index, core::SeededRng& rng) {
  const bool tuning = assist::tune_session_schedule(session_index);
  SessionRecord rec;
  rec.session_index = session_index;

  auto tally = [&rec](const GameResult& r) {
    for (const auto& tr : r.records) {
      ++rec.movements;
      switch (tr.judgement.category) {
        case JudgeCategory::hit: ++rec.hits; break;
        case JudgeCategory::early: ++rec.early; break;
        case JudgeCategory::late: ++rec.late; break;
        case JudgeCategory::miss: ++rec.miss; break;
      }
    }
  };

  int game_no = 0;
  for (int g = 0; g < plan.rehabhero_games; ++g, ++game_no) {
    auto content = rng.fork(100 + game_no);
    const int lanes = g < plan.rehabhero_games / 2 ? 2 : 3;
    const int n_notes =
        plan.notes_per_song + static_cast<int>(content.uniform_int(-2, 2));
    const Song song = generate_song(lanes, n_notes, content);
    auto r = run_rehabhero(mode, song, profile, assist_state, difficulty, tuning, rng);
    tally(r);
    if (tuning && r.assist.gain < 1e-9 && r.success_rate > assist::kSuccessTarget)
      difficulty = assist::escalate_difficulty(difficulty, r.success_rate);
    assist_state = std::move(r.assist);
  }
  const int n_pong = plan.fingerpong_rally_games + plan.fingerpong_target_games;
  for (int g = 0; g < n_pong; ++g, ++game_no) {
    auto content = rng.fork(100 + game_no);
    const int n_balls =
        plan.balls_per_game + static_cast<int>(content.uniform_int(-2, 2));
    const auto serves = generate_serves(n_balls, content);
    const PongPlay play =
        g < plan.fingerpong_rally_games ? PongPlay::rally : PongPlay::target;
    auto r = run_fingerpong(mode, play, serves, profile, assist_state, difficulty,
                            tuning, rng);
    tally(r);
    if (tuning && r.assist.gain < 1e-9 && r.success_rate > assist::kSuccessTarget)
      difficulty = assist::escalate_difficulty(difficulty, r.success_rate);
    assist_state = std::move(r.assist);
  }
  rec.assisted_success =
      rec.movements > 0 ? static_cast<double>(rec.hits) / rec.movements : 0.0;

  // unassisted probe games in sessions 3, 6, 9
  if (session_index == 3 || session_index == 6 || session_index == 9) {
    assist::AssistState probe = assist_state;
    probe.gain = 0.0;
    probe.channel_gains.clear();
    auto content = rng.fork(900 + session_index);
    const Song song = generate_song(3, 20, content);
    auto r1 = run_rehabhero(mode, song, profile, probe, difficulty, false, rng);
    const auto serves = generate_serves(15, content);
    auto r2 = run_fingerpong(mode, PongPlay::rally, serves, profile, probe,
                             difficulty, false, rng);
    const double total = static_cast<double>(song.notes.size() + serves.size());
    rec.unassisted_success =
        (r1.success_rate * song.notes.size() + r2.success_rate * serves.size()) / total;
  }

  rec.assist = std::move(assist_state);
  rec.difficulty = difficulty;
  return rec;
}

std::string records_to_csv(const std::vector<TrialRecord>& records,
                           int session, int game, GameMode mode) {
  std::ostringstream os;
  os << "session,game,mode,movement_idx,category,timing_error_s,gain\n";
  const char* mode_s = mode == GameMode::standard ? "standard"
                       : mode == GameMode::propriopixel ? "propriopixel"
                                                        : "virtual";
  for (const auto& r : records) {
    const char* cat = r.judgement.category == JudgeCategory::hit ? "hit"
                      : r.judgement.category == JudgeCategory::early ? "early"
                      : r.judgement.category == JudgeCategory::late ? "late"
                                                                    : "miss";
    os << session << "," << game << "," << mode_s << "," << r.movement_idx << ","
       << cat << "," << r.judgement.timing_error << "," << r.gain_after << "\n";
  }
  return os.str();
}

}  // namespace finger::games
