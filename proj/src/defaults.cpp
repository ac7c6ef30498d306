#include "finger/defaults.hpp"

#include "json.hpp"

namespace finger::defaults {

const std::string& defaults_json() {
  static const std::string doc = R"({
  "version": 1,
  "success_target": 0.80,
  "gain_step": 1.0,
  "intent_threshold_n": 2.0,
  "workspace_deg": [12.0, 54.0],
  "crisscross": {"n_crossings": 20, "speed_range_degps": [8.0, 18.0]},
  "impairment": {"control_mean_deg": 7.68, "control_sd_deg": 2.56},
  "session": {"rehabhero_games": 10, "fingerpong_rally": 10, "fingerpong_target": 8},
  "tuning_sessions": [1, 4, 7],
  "eeg": {
    "fs_hz": 300,
    "notch_hz": 60,
    "bandpass_hz": [0.1, 30.0],
    "epoch_ms": [-250, 3000],
    "baseline_ms": [-250, -50],
    "pcnv_window_s": [0.5, 1.0],
    "reject_abs_uv": 100.0,
    "reject_step_uv": 50.0,
    "reject_mad_mult": 3.0,
    "feedback_latency_s": 0.083
  },
  "mcid_blocks": 6,
  "outcome_model": {
    "standard_impaired":     {"mean": 0.8,  "sd": 2.3},
    "virtual_impaired":      {"mean": 4.5,  "sd": 4.4},
    "propriopixel_impaired": {"mean": 7.0,  "sd": 4.2},
    "standard_intact":       {"mean": 4.98, "sd": 6.7},
    "virtual_intact":        {"mean": -0.89,"sd": 6.7},
    "propriopixel_intact":   {"mean": 0.83, "sd": 6.7}
  },
  "minimization": {"biased_coin_p": 0.8, "bbt_cuts": [15.0, 35.0], "age_cuts": [50.0, 65.0]}
})";
  return doc;
}

patient::OutcomeModelParams outcome_params_from_json(const std::string& json_text) {
  auto params = patient::OutcomeModelParams::paper_calibrated();
  const auto j = nlohmann::json::parse(json_text);
  if (!j.contains("outcome_model")) return params;
  const auto& om = j.at("outcome_model");

  auto set_cell = [&](const char* key, patient::Group g, bool impaired) {
    if (!om.contains(key)) return;
    const auto& c = om.at(key);
    params.cells[{g, impaired}] = {c.at("mean").get<double>(),
                                   c.at("sd").get<double>()};
  };
  set_cell("standard_impaired", patient::Group::standard, true);
  set_cell("virtual_impaired", patient::Group::virtual_training, true);
  set_cell("propriopixel_impaired", patient::Group::propriopixel, true);
  set_cell("standard_intact", patient::Group::standard, false);
  set_cell("virtual_intact", patient::Group::virtual_training, false);
  set_cell("propriopixel_intact", patient::Group::propriopixel, false);
  return params;
}

}  // namespace finger::defaults
