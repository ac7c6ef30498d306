#pragma once

#include <optional>
#include <vector>

#include "finger/assist.hpp"
#include "finger/core.hpp"
#include "finger/patient.hpp"

namespace finger::games {

enum class Lane { top, middle, bottom };
enum class GameMode { standard, propriopixel, virtual_amp };

/// Finger combination required by a note: top = index, bottom = middle,
/// middle lane = both.
struct FingerSet {
  bool index = false;
  bool middle = false;
  bool operator==(const FingerSet&) const = default;
};

FingerSet fingers_for_lane(Lane lane);

struct NoteSpec {
  double hit_time = 0.0;  // s
  Lane lane = Lane::top;
  FingerSet required_fingers;
};

struct Song {
  std::vector<NoteSpec> notes;
  int lanes_used = 3;  // 2 or 3
};

enum class PongPlay { rally, target };

struct PongState {
  double ball_x = 0.5, ball_y = 0.5;       // normalized court
  double ball_vx = 0.5, ball_vy = 0.2;     // per second
  double paddle_y = 0.5;
  double paddle_half_height = 0.1;
  PongPlay mode = PongPlay::rally;
  double target_y = 0.5;                   // target mode only
};

enum class PongEvent { none, player_hit, player_miss, target_hit, target_miss };

enum class JudgeCategory { hit, early, late, miss };

struct Judgement {
  JudgeCategory category = JudgeCategory::miss;
  double timing_error = 0.0;  // s, signed; negative = early
};

struct SessionPlan {
  int rehabhero_games = 10;
  int fingerpong_rally_games = 10;
  int fingerpong_target_games = 8;
  int notes_per_song = 40;   // jittered +/-2 per game
  int balls_per_game = 36;   // jittered +/-2 per game
};

Judgement judge_note(const NoteSpec& note,
                     const std::optional<std::pair<FingerSet, double>>& movement,
                     double window);

/// Advances the ball by dt with reflecting top/bottom walls; reports plane
/// events at the player side (x<=0) and, in target mode, at the far side.
std::pair<PongState, PongEvent> step_pong(const PongState& s, double dt,
                                          double paddle_input);

/// Thumb pose cue for a note lane: radial abduction (1) for top, palmar (0)
/// for bottom, halfway for middle.
double propriopixel_note_cue(Lane lane);

/// Ball-finger angle cue: ball at the top maps to full extension
/// (workspace minimum), at the bottom to full flexion.
double propriopixel_ball_cue(double ball_y, const core::Workspace& ws);

Song generate_song(int lanes_used, int n_notes, core::SeededRng& content_rng,
                   double notes_per_second = 0.7);

struct PongServe {
  double start_y = 0.5;
  double angle = 0.0;  // radians off horizontal, toward the player
};

std::vector<PongServe> generate_serves(int n_balls, core::SeededRng& content_rng);

struct TrialRecord {
  int movement_idx = 0;
  Judgement judgement;
  double gain_before = 0.0;
  double gain_after = 0.0;
  assist::Channel channel;
};

struct GameResult {
  std::vector<TrialRecord> records;
  double success_rate = 0.0;
  assist::AssistState assist;
};

GameResult run_rehabhero(GameMode mode, const Song& song,
                         const patient::PatientProfile& profile,
                         assist::AssistState assist_state,
                         const assist::DifficultyState& difficulty,
                         bool tuning_enabled, core::SeededRng& rng);

GameResult run_fingerpong(GameMode mode, PongPlay play,
                          const std::vector<PongServe>& serves,
                          const patient::PatientProfile& profile,
                          assist::AssistState assist_state,
                          const assist::DifficultyState& difficulty,
                          bool tuning_enabled, core::SeededRng& rng);

struct SessionRecord {
  int session_index = 0;
  int movements = 0;
  int hits = 0, early = 0, late = 0, miss = 0;
  double assisted_success = 0.0;
  std::optional<double> unassisted_success;  // probe games, sessions 3/6/9
  assist::AssistState assist;
  assist::DifficultyState difficulty;
};

/// One training session: 10 RehabHero + 18 FingerPong games, ~1050
/// movements. Gains adapt only when the session is a tuning session;
/// unassisted probe games run in sessions 3, 6, 9.
SessionRecord run_session(const SessionPlan& plan, GameMode mode,
                          const patient::PatientProfile& profile,
                          assist::AssistState assist_state,
                          assist::DifficultyState difficulty,
                          int session_index, core::SeededRng& rng);

std::string records_to_csv(const std::vector<TrialRecord>& records,
                           int session, int game, GameMode mode);

}  // namespace finger::games
