#include "finger/patient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace finger::patient {

std::string to_string(Group g) {
  switch (g) {
    case Group::standard: return "standard";
    case Group::virtual_training: return "virtual";
    case Group::propriopixel: return "propriopixel";
    case Group::unassigned: return "unassigned";
  }
  return "unassigned";
}

Group group_from_string(const std::string& s) {
  if (s == "standard") return Group::standard;
  if (s == "virtual") return Group::virtual_training;
  if (s == "propriopixel") return Group::propriopixel;
  if (s == "unassigned") return Group::unassigned;
  throw std::invalid_argument("unknown group: " + s);
}

const OutcomeCell& OutcomeModelParams::cell(Group g, bool impaired) const {
  auto it = cells.find({g, impaired});
  if (it == cells.end())
    throw std::logic_error("OutcomeModelParams: missing cell for group " + to_string(g));
  return it->second;
}

OutcomeModelParams OutcomeModelParams::paper_calibrated() {
  OutcomeModelParams p;
  // Impaired cells: reported subgroup change scores (mean +/- sd blocks).
  p.cells[{Group::standard, true}] = {0.8, 2.3};
  p.cells[{Group::virtual_training, true}] = {4.5, 4.4};
  p.cells[{Group::propriopixel, true}] = {7.0, 4.2};
  // Intact cells: sd from the pooled cohort (6.7); means solved from the
  // responder-rate targets (40% / ~15% / ~22%) by inverting the Gaussian tail.
  p.cells[{Group::standard, false}] = {4.98, 6.7};
  p.cells[{Group::virtual_training, false}] = {-0.89, 6.7};
  p.cells[{Group::propriopixel, false}] = {0.83, 6.7};
  return p;
}

std::optional<double> perceive_crossing(const core::Trajectory& rising,
                                        const core::Trajectory& falling,
                                        const PatientProfile& profile,
                                        core::SeededRng& rng) {
  if (rising.empty() || falling.empty())
    throw std::invalid_argument("perceive_crossing: empty trajectory");
  const double t_end = std::min(rising.t_end(), falling.t_end());
  const double noise_sd = std::sqrt(2.0) * profile.prop_noise_sd;

  double prev_t = 0.0;
  double prev_v = falling.angle_at(0.0) - rising.angle_at(0.0) +
                  (noise_sd > 0 ? rng.normal(0.0, noise_sd) : 0.0);
  std::optional<double> trigger;
  if (prev_v <= 0.0) trigger = 0.0;
  for (double t = kPerceptResampleSeconds; !trigger && t <= t_end + 1e-12;
       t += kPerceptResampleSeconds) {
    const double tc = std::min(t, t_end);
    double v = falling.angle_at(tc) - rising.angle_at(tc);
    if (noise_sd > 0) v += rng.normal(0.0, noise_sd);
    if (v <= 0.0) {
      // linear interpolation to the perceived zero crossing
      trigger = prev_t + (tc - prev_t) * prev_v / (prev_v - v);
    }
    prev_t = tc;
    prev_v = v;
  }
  if (!trigger) return std::nullopt;

  double latency = profile.latency_mean;
  if (profile.latency_sd > 0) latency = rng.normal(profile.latency_mean, profile.latency_sd);
  latency = std::max(0.0, latency);
  const double press = *trigger + latency;
  if (press > t_end) return std::nullopt;
  return press;
}

double success_probability(const PatientProfile& profile, double gain,
                           double difficulty, const ResponseConstants& k) {
  const double z = k.a * (profile.skill + k.b * gain - k.c * difficulty);
  return 1.0 / (1.0 + std::exp(-z));
}

MovementEvent respond_to_note(double hit_time, double window,
                              const PatientProfile& profile, double gain,
                              double difficulty, core::SeededRng& rng,
                              const ResponseConstants& k) {
  if (window <= 0) throw std::invalid_argument("respond_to_note: window must be positive");
  const double p = success_probability(profile, gain, difficulty, k);
  MovementEvent ev;
  if (rng.uniform() < p) {
    ev.moved = true;
    ev.correct_fingers = true;
    ev.press_time = hit_time + rng.uniform(-0.9 * window, 0.9 * window);
    return ev;
  }
  // Failures are dominated by timing errors, not missed movements.
  if (rng.uniform() < 0.15) return ev;  // no movement
  ev.moved = true;
  ev.correct_fingers = true;
  const double overshoot = window * (1.05 + 0.5 * std::abs(rng.normal()));
  ev.press_time = hit_time + (rng.uniform() < 0.5 ? -overshoot : overshoot);
  return ev;
}

int sample_outcome(const PatientProfile& profile,
                   const OutcomeModelParams& params, core::SeededRng& rng) {
  if (profile.group == Group::unassigned)
    throw std::logic_error("sample_outcome: participant has no group");
  const OutcomeCell& c = params.cell(profile.group, profile.impaired);
  return static_cast<int>(std::lround(rng.normal(c.mean_dbbt, c.sd_dbbt)));
}

namespace {
nlohmann::json profile_to_json(const PatientProfile& p) {
  return {{"id", p.id},
          {"age", p.age},
          {"baseline_bbt", p.baseline_bbt},
          {"prop_noise_sd", p.prop_noise_sd},
          {"latency_mean", p.latency_mean},
          {"latency_sd", p.latency_sd},
          {"motor_noise_sd", p.motor_noise_sd},
          {"skill", p.skill},
          {"group", to_string(p.group)},
          {"impaired", p.impaired}};
}

PatientProfile profile_from_json(const nlohmann::json& j) {
  PatientProfile p;
  p.id = j.value("id", "");
  p.age = j.value("age", 57.0);
  p.baseline_bbt = j.value("baseline_bbt", 24.0);
  p.prop_noise_sd = j.value("prop_noise_sd", 2.0);
  p.latency_mean = j.value("latency_mean", 0.25);
  p.latency_sd = j.value("latency_sd", 0.05);
  p.motor_noise_sd = j.value("motor_noise_sd", 1.0);
  p.skill = j.value("skill", 0.0);
  p.group = group_from_string(j.value("group", "unassigned"));
  p.impaired = j.value("impaired", false);
  if (!p.valid()) throw std::invalid_argument("invalid patient profile: " + p.id);
  return p;
}
}  // namespace

std::string cohort_to_json(const std::vector<PatientProfile>& cohort) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : cohort) arr.push_back(profile_to_json(p));
  return nlohmann::json{{"participants", arr}}.dump(2);
}

std::vector<PatientProfile> cohort_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  std::vector<PatientProfile> out;
  for (const auto& pj : j.at("participants")) out.push_back(profile_from_json(pj));
  return out;
}

std::vector<PatientProfile> generate_cohort(const CohortSpec& spec,
                                            core::SeededRng& rng) {
  std::vector<PatientProfile> cohort;
  cohort.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    PatientProfile p;
    p.id = "P" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1);
    p.age = std::clamp(rng.normal(spec.age_mean, spec.age_sd), 25.0, 85.0);
    p.baseline_bbt = std::clamp(std::round(rng.normal(spec.bbt_mean, spec.bbt_sd)), 3.0, 53.0);
    const bool impaired = rng.uniform() < spec.impaired_fraction;
    if (impaired) {
      p.prop_noise_sd = std::max(1.0, rng.normal(5.0, 1.0));
      p.latency_mean = std::max(0.60, rng.normal(0.95, 0.12));
    } else {
      p.prop_noise_sd = std::max(0.3, rng.normal(2.0, 0.5));
      p.latency_mean = std::clamp(rng.normal(0.30, 0.06), 0.08, 0.45);
    }
    p.latency_sd = 0.05;
    p.motor_noise_sd = std::max(0.2, rng.normal(1.0, 0.3));
    p.skill = rng.normal(0.0, 0.5);
    p.impaired = impaired;
    cohort.push_back(p);
  }
  return cohort;
}

PatientProfile control_profile() {
  PatientProfile p;
  p.id = "control";
  p.age = 55.6;
  p.prop_noise_sd = 2.0;
  p.latency_mean = 0.30;
  p.latency_sd = 0.05;
  p.skill = 1.0;
  return p;
}

}  // namespace finger::patient
