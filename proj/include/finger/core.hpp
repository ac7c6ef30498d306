#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace finger::core {

/// Finger/thumb kinematic state. MCP angles in degrees, thumb as a
/// normalized circumduction position (0 = palmar abduction, 1 = radial).
struct JointAngles {
  double index_mcp = 0.0;
  double middle_mcp = 0.0;
  double thumb = 0.0;
};

/// Per-joint angular range. The training workspace is the active range
/// capped at 90% of the passive range.
struct Workspace {
  double min_deg = 12.0;
  double max_deg = 54.0;

  bool valid() const { return min_deg < max_deg; }
  double mid() const { return 0.5 * (min_deg + max_deg); }
  double span() const { return max_deg - min_deg; }
};

/// Training workspace from measured ranges: full active range, bounded to
/// 90% of the passive range (cap applied symmetrically about the passive
/// midpoint).
Workspace training_workspace(const Workspace& active, const Workspace& passive);

struct TrajectorySample {
  double t = 0.0;         // seconds
  double angle = 0.0;     // degrees
  double velocity = 0.0;  // deg/s
};

/// Time-stamped reference path for one joint. Sample times are strictly
/// increasing.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }

  /// Linear interpolation of angle at time t. Throws if t is outside the span.
  double angle_at(double t) const;
  double velocity_at(double t) const;

  /// CSV serialization with header `t,angle_deg,velocity_degps`.
  std::string to_csv() const;
};

/// Counter-based deterministic RNG: identical (seed, stream) gives an
/// identical draw sequence. Normal draws use Box-Muller so the sequence
/// does not depend on library internals.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mean = 0.0, double sd = 1.0);

  /// Child generator with an independent stream, derived deterministically.
  SeededRng fork(std::uint64_t substream) const;

 private:
  std::uint64_t next_u64();

  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Minimum-jerk quintic from start to end over [t0, t1], sampled at dt.
/// Velocity is zero at both endpoints.
Trajectory minimum_jerk_trajectory(double start, double end, double t0,
                                   double t1, double dt);

double clamp_to_workspace(double angle, const Workspace& ws);

/// Two constant-speed ramps in opposite directions across [ws_low, ws_high];
/// the fingers cross exactly at the midpoint. Returns (rising, falling,
/// t_cross).
std::tuple<Trajectory, Trajectory, double> crossing_pattern(double ws_low,
                                                            double ws_high,
                                                            double speed,
                                                            double dt);

}  // namespace finger::core
