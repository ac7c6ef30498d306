#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finger/core.hpp"

namespace finger::patient {

enum class Group { standard, virtual_training, propriopixel, unassigned };

std::string to_string(Group g);
Group group_from_string(const std::string& s);

/// Simulated participant. Perceptual noise and latency drive the
/// proprioceptive assessments; skill drives gameplay success; the outcome
/// model cell (group x impairment) drives the clinical endpoint.
struct PatientProfile {
  std::string id;
  double age = 57.0;             // years
  double baseline_bbt = 24.0;    // blocks
  double prop_noise_sd = 2.0;    // deg, perceived-angle noise per finger
  double latency_mean = 0.25;    // s
  double latency_sd = 0.05;      // s
  double motor_noise_sd = 1.0;   // deg
  double skill = 0.0;            // dimensionless gameplay ability
  Group group = Group::unassigned;
  bool impaired = false;         // derived from baseline Crisscross

  bool valid() const {
    return prop_noise_sd >= 0 && latency_sd >= 0 && motor_noise_sd >= 0 &&
           baseline_bbt >= 0;
  }
};

struct OutcomeCell {
  double mean_dbbt = 0.0;  // blocks
  double sd_dbbt = 1.0;    // blocks, > 0
};

/// Per (group x impairment) change-score model for the primary outcome.
struct OutcomeModelParams {
  std::map<std::pair<Group, bool>, OutcomeCell> cells;

  const OutcomeCell& cell(Group g, bool impaired) const;
  /// Cells calibrated to the trial's reported subgroup statistics.
  static OutcomeModelParams paper_calibrated();
};

/// Press decision for one Crisscross crossing: the participant presses when
/// the noisy perceived separation (resampled every 50 ms) first changes
/// sign, plus their response latency. Returns nullopt when no press lands
/// inside the trial span.
std::optional<double> perceive_crossing(const core::Trajectory& rising,
                                        const core::Trajectory& falling,
                                        const PatientProfile& profile,
                                        core::SeededRng& rng);

struct MovementEvent {
  bool moved = false;
  bool correct_fingers = false;
  double press_time = 0.0;  // s, valid when moved
};

/// Gameplay response model closing the loop with the gain staircase:
/// P(success) = logistic(a*(skill + b*gain - c*difficulty)).
struct ResponseConstants {
  double a = 1.5;
  double b = 0.5;
  double c = 1.0;
};

double success_probability(const PatientProfile& profile, double gain,
                           double difficulty,
                           const ResponseConstants& k = {});

/// Samples a movement response to a cue at `hit_time` with tolerance
/// `window`. Successful responses land inside the window; failures are
/// early/late presses or (rarely) absent movements.
MovementEvent respond_to_note(double hit_time, double window,
                              const PatientProfile& profile, double gain,
                              double difficulty, core::SeededRng& rng,
                              const ResponseConstants& k = {});

/// Draws the participant's BBT change score from their outcome cell,
/// rounded to whole blocks.
int sample_outcome(const PatientProfile& profile,
                   const OutcomeModelParams& params, core::SeededRng& rng);

/// JSON (de)serialization of cohorts.
std::string cohort_to_json(const std::vector<PatientProfile>& cohort);
std::vector<PatientProfile> cohort_from_json(const std::string& json_text);

struct CohortSpec {
  int n = 45;
  double impaired_fraction = 0.44;
  double age_mean = 57.0, age_sd = 14.0;
  double bbt_mean = 26.0, bbt_sd = 14.0;
};

/// Generates a cohort matched to the trial's baseline marginals. Impaired
/// participants get perceptual parameters that put their Crisscross error
/// above the impairment threshold.
std::vector<PatientProfile> generate_cohort(const CohortSpec& spec,
                                            core::SeededRng& rng);

/// Perceptual parameters of the unimpaired control cohort used for the
/// impairment threshold.
PatientProfile control_profile();

constexpr double kPerceptResampleSeconds = 0.050;

}  // namespace finger::patient
