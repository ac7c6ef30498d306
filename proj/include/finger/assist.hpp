#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "finger/core.hpp"

namespace finger::assist {

enum class Mode { physical, virtual_amp, none };

enum class Outcome { success, failure };

/// Channel key for per-finger, per-direction gains (RehabHero). FingerPong
/// pools everything on one channel.
struct Channel {
  enum class Finger { index, middle } finger = Finger::index;
  enum class Direction { flexion, extension } direction = Direction::flexion;
  auto operator<=>(const Channel&) const = default;
};

/// Adaptive assistance gain state. Failure raises the gain by one step,
/// success lowers it by a quarter step; the 4:1 ratio makes the staircase
/// stationary at 80% success.
struct AssistState {
  double gain = 0.0;
  double step = 1.0;
  Mode mode = Mode::physical;
  std::map<Channel, double> channel_gains;  // empty => single pooled gain

  bool valid() const { return gain >= 0.0 && step > 0.0; }
};

struct DifficultyState {
  double timing_window = 0.20;     // s, RehabHero hit tolerance
  double ball_speed_scale = 1.0;   // >= 1
  double paddle_scale = 1.0;       // in (0, 1]

  static constexpr double kTimingWindowFloor = 0.05;
  static constexpr double kBallSpeedCeiling = 3.0;
  static constexpr double kPaddleFloor = 0.25;
};

AssistState update_gain(const AssistState& s, Outcome outcome);

/// Per-channel variant: updates only the named channel's gain.
AssistState update_gain(const AssistState& s, Outcome outcome, const Channel& ch);

double channel_gain(const AssistState& s, const Channel& ch);

/// Assist-as-needed force command. Zero unless the participant initiates
/// the movement (intent force >= 2 N); otherwise proportional to tracking
/// error with unit stiffness scaled by the gain.
double physical_assist_force(double gain, const core::Trajectory& ref,
                             double current_angle, double t,
                             double intent_force_n);

/// Display remapping for virtual assistance: amplify excursion about the
/// workspace midpoint by `gain` (>= 1), clamped to the workspace.
double virtual_map(double gain, double x, const core::Workspace& ws);

/// Escalates gaming difficulty when unassisted success exceeds the 80%
/// target: tighter timing window, faster ball, smaller paddle.
DifficultyState escalate_difficulty(const DifficultyState& d,
                                    double unassisted_success);

/// Gains are tuned only in the first session of each week (1, 4, 7) and
/// held constant otherwise.
bool tune_session_schedule(int session_index);

constexpr double kIntentThresholdNewtons = 2.0;
constexpr double kUnitStiffness = 1.0;
constexpr double kSuccessTarget = 0.80;

}  // namespace finger::assist
