#include "finger/assist.hpp"

#include <algorithm>
#include <cmath>

namespace finger::assist {

namespace {
double apply_update(double gain, double step, Outcome outcome) {
  if (outcome == Outcome::failure) return gain + step;
  return std::max(0.0, gain - 0.25 * step);
}
}  // namespace

AssistState update_gain(const AssistState& s, Outcome outcome) {
  AssistState out = s;
  out.gain = apply_update(s.gain, s.step, outcome);
  return out;
}

AssistState update_gain(const AssistState& s, Outcome outcome, const Channel& ch) {
  AssistState out = s;
  if (out.channel_gains.empty()) {
    // first per-channel update: seed every channel from the pooled gain
    for (auto f : {Channel::Finger::index, Channel::Finger::middle})
      for (auto d : {Channel::Direction::flexion, Channel::Direction::extension})
        out.channel_gains[{f, d}] = s.gain;
  }
  auto it = out.channel_gains.find(ch);
  it->second = apply_update(it->second, s.step, outcome);
  // pooled gain tracks the channel average
  double sum = 0.0;
  for (const auto& [k, v] : out.channel_gains) sum += v;
  out.gain = sum / static_cast<double>(out.channel_gains.size());
  return out;
}

double channel_gain(const AssistState& s, const Channel& ch) {
  auto it = s.channel_gains.find(ch);
  return it == s.channel_gains.end() ? s.gain : it->second;
}

double physical_assist_force(double gain, const core::Trajectory& ref,
                             double current_angle, double t,
                             double intent_force_n) {
  if (ref.empty() || t < ref.t_begin() - 1e-12 || t > ref.t_end() + 1e-12)
    throw std::invalid_argument("physical_assist_force: t outside reference span");
  if (intent_force_n < kIntentThresholdNewtons) return 0.0;
  const double error = ref.angle_at(t) - current_angle;
  return gain * kUnitStiffness * error;
}

double virtual_map(double gain, double x, const core::Workspace& ws) {
  if (gain < 1.0) throw std::invalid_argument("virtual_map: gain must be >= 1");
  if (!ws.valid()) throw std::invalid_argument("virtual_map: invalid workspace");
  const double mid = ws.mid();
  return std::clamp(mid + gain * (x - mid), ws.min_deg, ws.max_deg);
}

DifficultyState escalate_difficulty(const DifficultyState& d,
                                    double unassisted_success) {
  if (unassisted_success <= kSuccessTarget) return d;
  DifficultyState out = d;
  out.timing_window = std::max(DifficultyState::kTimingWindowFloor, d.timing_window * 0.9);
  out.ball_speed_scale = std::min(DifficultyState::kBallSpeedCeiling, d.ball_speed_scale * 1.1);
  out.paddle_scale = std::max(DifficultyState::kPaddleFloor, d.paddle_scale * 0.9);
  return out;
}

bool tune_session_schedule(int session_index) {
  if (session_index < 1 || session_index > 9)
    throw std::invalid_argument("tune_session_schedule: session out of range");
  return session_index == 1 || session_index == 4 || session_index == 7;
}

}  // namespace finger::assist
