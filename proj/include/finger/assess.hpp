#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finger/core.hpp"
#include "finger/patient.hpp"

namespace finger::assess {

struct CrossingTrial {
  double speed = 0.0;                 // deg/s
  std::optional<double> press_time;   // s; nullopt = no press
  double error_deg = 0.0;             // |separation| at press (or trial end)
};

struct CrisscrossResult {
  std::vector<CrossingTrial> trials;
  double mean_abs_error = 0.0;  // deg
};

/// Impairment cut from the unimpaired control cohort: mean + 2 sd.
struct ImpairmentThreshold {
  double control_mean = 7.68;  // deg
  double control_sd = 2.56;    // deg
  double threshold() const { return control_mean + 2.0 * control_sd; }
};

/// 20 crossings at pseudorandomized speeds in [8, 18] deg/s across the
/// 12-54 deg workspace; error is the angular separation at button press.
/// No-press trials score the end-of-trial separation.
CrisscrossResult run_crisscross(const patient::PatientProfile& profile,
                                core::SeededRng& rng,
                                const core::Workspace& ws = {12.0, 54.0},
                                int n_crossings = 20, double speed_lo = 8.0,
                                double speed_hi = 18.0);

/// True iff the error strictly exceeds the two-sd cut.
bool classify_impairment(double mean_error, const ImpairmentThreshold& thr = {});

/// Active tracking of a robot-driven triangle wave (default 10 deg/s over
/// 12-54 deg); returns the time-averaged absolute tracking error.
double run_move_match(const patient::PatientProfile& profile,
                      core::SeededRng& rng, double driver_speed = 10.0,
                      const core::Workspace& ws = {12.0, 54.0},
                      double duration_s = 60.0);

struct ThumbSenseResult {
  double percent_accuracy = 0.0;
  double percent_missed = 0.0;
  int n_trials = 0;
};

/// Three-alternative thumb-pose identification via nearest prototype on a
/// noise-perturbed pose. 1 pose unit spans 40 deg of thumb travel.
ThumbSenseResult run_thumbsense(const patient::PatientProfile& profile,
                                core::SeededRng& rng, int n_trials = 15);

/// Shoelace area of the index/middle maximal-force boundary, normalized by
/// a reference area.
double hand_capacity(const std::vector<std::pair<double, double>>& force_boundary,
                     double reference_area = 1.0);

enum class Assessment {
  thumbsense,
  move_match,
  bbt,
  crisscross,
  unassisted_gameplay,
  tuning,
};

/// Weekly assessment schedule: ThumbSense + tuning in sessions 1/4/7,
/// Move and Match + BBT in 2/5/8, Crisscross + unassisted gameplay in 3/6/9.
std::set<Assessment> assessment_schedule(int session);

std::string to_string(Assessment a);

constexpr double kThumbPoseUnitsPerDeg = 1.0 / 40.0;

}  // namespace finger::assess
