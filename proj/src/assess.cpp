#include "finger/assess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace finger::assess {

CrisscrossResult run_crisscross(const patient::PatientProfile& profile,
                                core::SeededRng& rng, const core::Workspace& ws,
                                int n_crossings, double speed_lo, double speed_hi) {
  if (!profile.valid()) throw std::invalid_argument("run_crisscross: invalid profile");
  // pseudorandomized speeds: stratified evenly over the range, then shuffled
  std::vector<double> speeds(n_crossings);
  for (int i = 0; i < n_crossings; ++i) {
    speeds[i] = n_crossings == 1
                    ? 0.5 * (speed_lo + speed_hi)
                    : speed_lo + (speed_hi - speed_lo) * i / (n_crossings - 1.0);
  }
  for (int i = n_crossings - 1; i > 0; --i) {
    const auto j = rng.uniform_int(0, i);
    std::swap(speeds[i], speeds[j]);
  }

  CrisscrossResult res;
  double sum = 0.0;
  for (double speed : speeds) {
    auto [rising, falling, t_cross] =
        core::crossing_pattern(ws.min_deg, ws.max_deg, speed, 0.001);
    const auto press = patient::perceive_crossing(rising, falling, profile, rng);
    CrossingTrial trial;
    trial.speed = speed;
    trial.press_time = press;
    if (press) {
      trial.error_deg = std::abs(falling.angle_at(*press) - rising.angle_at(*press));
    } else {
      // no press: score the end-of-trial separation
      trial.error_deg = std::abs(falling.samples.back().angle - rising.samples.back().angle);
    }
    sum += trial.error_deg;
    res.trials.push_back(trial);
  }
  res.mean_abs_error = sum / static_cast<double>(n_crossings);
  return res;
}

bool classify_impairment(double mean_error, const ImpairmentThreshold& thr) {
  if (mean_error < 0) throw std::invalid_argument("classify_impairment: negative error");
  return mean_error > thr.threshold();
}

namespace {
// triangle wave between ws bounds starting at the minimum, clamped before t=0
double triangle_angle(double t, double speed, const core::Workspace& ws) {
  if (t <= 0.0) return ws.min_deg;
  const double period = 2.0 * ws.span() / speed;
  double ph = std::fmod(t, period);
  if (ph < period / 2.0) return ws.min_deg + speed * ph;
  return ws.max_deg - speed * (ph - period / 2.0);
}
}  // namespace

double run_move_match(const patient::PatientProfile& profile,
                      core::SeededRng& rng, double driver_speed,
                      const core::Workspace& ws, double duration_s) {
  if (driver_speed <= 0) throw std::invalid_argument("run_move_match: bad speed");
  double lag = profile.latency_mean;
  if (profile.latency_sd > 0) lag = std::max(0.0, rng.normal(profile.latency_mean, profile.latency_sd));

  const double dt = 0.01;
  double noise = 0.0;
  double next_resample = 0.0;
  double sum = 0.0;
  int n = 0;
  for (double t = 0.0; t <= duration_s; t += dt) {
    if (t >= next_resample) {
      noise = profile.prop_noise_sd > 0 ? rng.normal(0.0, profile.prop_noise_sd) : 0.0;
      next_resample += patient::kPerceptResampleSeconds;
    }
    const double driver = triangle_angle(t, driver_speed, ws);
    const double tracker = triangle_angle(t - lag, driver_speed, ws) + noise;
    sum += std::abs(tracker - driver);
    ++n;
  }
  return sum / static_cast<double>(n);
}

ThumbSenseResult run_thumbsense(const patient::PatientProfile& profile,
                                core::SeededRng& rng, int n_trials) {
  if (n_trials < 10 || n_trials > 30)
    throw std::invalid_argument("run_thumbsense: n_trials outside [10, 30]");
  // sd in pose units: prop_noise_sd (deg) over the 40 deg thumb travel
  const double sd = profile.prop_noise_sd * kThumbPoseUnitsPerDeg;
  static constexpr double kPrototypes[3] = {0.0, 0.5, 1.0};
  int correct = 0;
  for (int i = 0; i < n_trials; ++i) {
    const auto true_idx = rng.uniform_int(0, 2);
    rng.uniform(6.0, 10.0);  // hold duration; draw kept for stream stability
    const double perceived = kPrototypes[true_idx] + (sd > 0 ? rng.normal(0.0, sd) : 0.0);
    int best = 0;
    double best_d = std::abs(perceived - kPrototypes[0]);
    for (int k = 1; k < 3; ++k) {
      const double d = std::abs(perceived - kPrototypes[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (best == true_idx) ++correct;
  }
  ThumbSenseResult res;
  res.n_trials = n_trials;
  res.percent_accuracy = 100.0 * correct / n_trials;
  res.percent_missed = 100.0 - res.percent_accuracy;
  return res;
}

namespace {
bool segments_intersect(std::pair<double, double> a, std::pair<double, double> b,
                        std::pair<double, double> c, std::pair<double, double> d) {
  auto cross = [](std::pair<double, double> o, std::pair<double, double> p,
                  std::pair<double, double> q) {
    return (p.first - o.first) * (q.second - o.second) -
           (p.second - o.second) * (q.first - o.first);
  };
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}
}  // namespace

double hand_capacity(const std::vector<std::pair<double, double>>& boundary,
                     double reference_area) {
  const std::size_t n = boundary.size();
  if (n < 3) throw std::invalid_argument("hand_capacity: need >= 3 vertices");
  if (reference_area <= 0) throw std::invalid_argument("hand_capacity: bad reference");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // shared endpoint
      if (segments_intersect(boundary[i], boundary[(i + 1) % n], boundary[j],
                             boundary[(j + 1) % n]))
        throw std::invalid_argument("hand_capacity: self-intersecting boundary");
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = boundary[i];
    const auto& q = boundary[(i + 1) % n];
    area2 += p.first * q.second - q.first * p.second;
  }
  const double area = std::abs(area2) / 2.0;
  if (area <= 1e-12)
    throw std::invalid_argument("hand_capacity: degenerate boundary");
  return area / reference_area;
}

std::set<Assessment> assessment_schedule(int session) {
  if (session < 1 || session > 9)
    throw std::invalid_argument("assessment_schedule: session out of range");
  switch (session % 3) {
    case 1: return {Assessment::thumbsense, Assessment::tuning};
    case 2: return {Assessment::move_match, Assessment::bbt};
    default: return {Assessment::crisscross, Assessment::unassisted_gameplay};
  }
}

std::string to_string(Assessment a) {
  switch (a) {
    case Assessment::thumbsense: return "thumbsense";
    case Assessment::move_match: return "move_match";
    case Assessment::bbt: return "bbt";
    case Assessment::crisscross: return "crisscross";
    case Assessment::unassisted_gameplay: return "unassisted_gameplay";
    case Assessment::tuning: return "tuning";
  }
  return "";
}

}  // namespace finger::assess
