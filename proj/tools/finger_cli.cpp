// finger: command-line front end for the simulation laboratory.
//
// Subcommands: controller-demo, assess, eeg synth, eeg process, trial,
// report, cohort. Every subcommand is fully determined by --seed; files are
// written atomically (temp file + rename).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finger/assess.hpp"
#include "finger/assist.hpp"
#include "finger/core.hpp"
#include "finger/defaults.hpp"
#include "finger/eeg.hpp"
#include "finger/games.hpp"
#include "finger/patient.hpp"
#include "finger/stats.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace finger;

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    if (!f.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

patient::PatientProfile profile_from_json_obj(const json& j) {
  patient::PatientProfile p;
  p.id = j.value("id", "");
  p.age = j.value("age", 57.0);
  p.baseline_bbt = j.value("baseline_bbt", 24.0);
  p.prop_noise_sd = j.value("prop_noise_sd", 2.0);
  p.latency_mean = j.value("latency_mean", 0.25);
  p.latency_sd = j.value("latency_sd", 0.05);
  p.motor_noise_sd = j.value("motor_noise_sd", 1.0);
  p.skill = j.value("skill", 0.0);
  p.group = patient::group_from_string(j.value("group", "unassigned"));
  p.impaired = j.value("impaired", false);
  if (!p.valid()) throw std::runtime_error("invalid patient profile: " + p.id);
  return p;
}

json profile_to_json_obj(const patient::PatientProfile& p) {
  return {{"id", p.id},
          {"age", p.age},
          {"baseline_bbt", p.baseline_bbt},
          {"prop_noise_sd", p.prop_noise_sd},
          {"latency_mean", p.latency_mean},
          {"latency_sd", p.latency_sd},
          {"motor_noise_sd", p.motor_noise_sd},
          {"skill", p.skill},
          {"group", patient::to_string(p.group)},
          {"impaired", p.impaired}};
}

patient::PatientProfile load_patient(const std::string& path) {
  const json j = json::parse(slurp(path));
  if (j.contains("participants")) {
    const auto& arr = j.at("participants");
    if (arr.empty()) throw std::runtime_error("empty cohort: " + path);
    return profile_from_json_obj(arr.front());
  }
  return profile_from_json_obj(j);
}

// ---------------------------------------------------------------------------
// controller-demo

int cmd_controller_demo(double skill, int movements, std::uint64_t seed,
                        const std::string& out_path) {
  if (movements < 100)
    throw std::runtime_error("controller-demo: need at least 100 movements");
  patient::PatientProfile profile;
  profile.skill = skill;
  core::SeededRng rng(seed, 17);

  assist::AssistState state;
  std::ostringstream csv;
  csv << "trial,outcome,gain_before,gain_after,channel\n";
  int window = std::min(2000, movements / 2);
  int tail_success = 0;
  for (int i = 0; i < movements; ++i) {
    const double gain_before = state.gain;
    const double p = patient::success_probability(profile, state.gain, 1.0);
    const bool success = rng.uniform() < p;
    state = assist::update_gain(
        state, success ? assist::Outcome::success : assist::Outcome::failure);
    csv << i << ',' << (success ? "success" : "failure") << ',' << gain_before
        << ',' << state.gain << ",pooled\n";
    if (i >= movements - window && success) ++tail_success;
  }
  if (movements < 2000)
    std::cerr << "warning: pre-equilibrium (fewer than 2000 movements); "
                 "terminal success rate is unreliable\n";
  const double rate = static_cast<double>(tail_success) / window;
  if (!out_path.empty())
    atomic_write(out_path, csv.str());
  else
    std::cout << csv.str();
  std::printf("terminal success rate: %.3f over last %d movements\n", rate,
              window);
  std::printf("final assistance gain: %.3f\n", state.gain);
  return 0;
}

// ---------------------------------------------------------------------------
// assess

int cmd_assess(const std::string& which, const std::string& patient_path,
               std::uint64_t seed, const std::string& out_path) {
  patient::PatientProfile profile = patient_path.empty()
                                        ? patient::control_profile()
                                        : load_patient(patient_path);
  core::SeededRng rng(seed, 23);
  std::ostringstream csv;
  if (which == "crisscross") {
    const auto res = assess::run_crisscross(profile, rng);
    csv << "trial,speed_degps,press_time_s,error_deg\n";
    for (std::size_t i = 0; i < res.trials.size(); ++i) {
      const auto& tr = res.trials[i];
      csv << i << ',' << tr.speed << ',';
      if (tr.press_time)
        csv << *tr.press_time;
      else
        csv << "none";
      csv << ',' << tr.error_deg << '\n';
    }
    std::printf("crisscross mean absolute error: %.2f deg (%s)\n",
                res.mean_abs_error,
                assess::classify_impairment(res.mean_abs_error) ? "impaired"
                                                                : "unimpaired");
  } else if (which == "movematch") {
    const double err = assess::run_move_match(profile, rng);
    csv << "measure,value\nmove_match_error_deg," << err << '\n';
    std::printf("move and match tracking error: %.2f deg\n", err);
  } else if (which == "thumbsense") {
    const auto res = assess::run_thumbsense(profile, rng);
    csv << "measure,value\npercent_accuracy," << res.percent_accuracy
        << "\npercent_missed," << res.percent_missed << "\nn_trials,"
        << res.n_trials << '\n';
    std::printf("thumbsense: %.1f%% correct, %.1f%% missed (%d trials)\n",
                res.percent_accuracy, res.percent_missed, res.n_trials);
  } else if (which == "handcap") {
    // maximal-force boundary: 16-point star perturbed by motor noise
    std::vector<std::pair<double, double>> boundary, reference;
    const double base = 25.0;
    double ref_area = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double a = 2.0 * M_PI * i / 16;
      reference.emplace_back(base * std::cos(a), base * std::sin(a));
      const double r =
          std::max(1.0, base + rng.normal(0.0, 2.0 * profile.motor_noise_sd));
      boundary.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    ref_area = assess::hand_capacity(reference, 1.0);
    const double cap = assess::hand_capacity(boundary, ref_area);
    csv << "measure,value\nhand_capacity_ratio," << cap << '\n';
    std::printf("hand capacity: %.3f (normalized force-space area)\n", cap);
  } else {
    throw std::runtime_error("unknown assessment '" + which +
                             "' (crisscross|movematch|thumbsense|handcap)");
  }
  if (!out_path.empty()) atomic_write(out_path, csv.str());
  return 0;
}

// ---------------------------------------------------------------------------
// eeg synth / process

int cmd_eeg_synth(const std::string& out_dir, std::uint64_t seed,
                  double pcnv_gain, double noise_rms, int n_crossings) {
  fs::create_directories(out_dir);
  eeg::SynthConfig cfg;
  cfg.pcnv_gain_uv = pcnv_gain;
  cfg.noise_rms_uv = noise_rms;
  cfg.n_crossings = n_crossings;
  core::SeededRng rng(seed, 31);
  const auto out = eeg::synth_recording(cfg, rng);

  const fs::path dir(out_dir);
  eeg::save_recording(out.recording, (dir / "recording.csv.tmp").string(),
                      (dir / "recording.json.tmp").string());
  fs::rename(dir / "recording.csv.tmp", dir / "recording.csv");
  fs::rename(dir / "recording.json.tmp", dir / "recording.json");

  json truth;
  truth["pcnv_gain_uv"] = cfg.pcnv_gain_uv;
  truth["speeds"] = out.speeds;
  truth["press_times"] = out.press_times;
  atomic_write(dir / "ground_truth.json", truth.dump(2) + "\n");
  std::printf("wrote %d-crossing recording to %s\n", cfg.n_crossings,
              out_dir.c_str());
  return 0;
}

int cmd_eeg_process(const std::string& in_dir, const std::string& out_dir,
                    std::uint64_t seed) {
  const fs::path in(in_dir);
  auto rec = eeg::load_recording((in / "recording.csv").string(),
                                 (in / "recording.json").string());
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  rec = eeg::notch_then_bandpass(rec);
  core::SeededRng rng(seed, 37);
  auto [clean, eye_report] = eeg::remove_eye_artifacts(rec, rng);
  if (!eye_report.ica_converged)
    std::cerr << "warning: blink component did not converge; "
                 "eye-artifact removal skipped\n";

  const auto epochs = eeg::extract_epochs(clean);
  const auto rejection = eeg::epoch_reject(epochs);
  const auto result = eeg::pcnv(epochs, rejection);
  atomic_write(dir / "pcnv.csv", result.to_csv());

  json rep;
  rep["overall_rejection_fraction"] = rejection.overall_rejection_fraction;
  rep["removed_components"] = eye_report.removed_components;
  rep["ica_converged"] = eye_report.ica_converged;
  atomic_write(dir / "process_report.json", rep.dump(2) + "\n");

  // correlation map needs the task kinematics; rebuild them from the
  // ground-truth speeds when the sidecar is present
  const fs::path truth_path = in / "ground_truth.json";
  if (fs::exists(truth_path)) {
    const json truth = json::parse(slurp(truth_path));
    eeg::SynthOutput task;
    task.speeds = truth.at("speeds").get<std::vector<double>>();
    task.press_times = truth.at("press_times").get<std::vector<double>>();
    for (double sp : task.speeds) {
      auto [rising, falling, t_cross] =
          core::crossing_pattern(12.0, 54.0, sp, 1.0 / clean.fs);
      (void)t_cross;
      task.kinematics.emplace_back(std::move(rising), std::move(falling));
    }
    atomic_write(dir / "correlation_map.csv",
                 eeg::kinematic_correlation_map(clean, task).to_csv());
  }

  const auto& pz = result.amplitude_uv.count("Pz")
                       ? result.amplitude_uv.at("Pz")
                       : std::optional<double>{};
  if (pz)
    std::printf("Pz pCNV: %.3f uV (rejection %.1f%%)\n", *pz,
                100.0 * rejection.overall_rejection_fraction);
  else
    std::printf("Pz pCNV: insufficient epochs (rejection %.1f%%)\n",
                100.0 * rejection.overall_rejection_fraction);
  return 0;
}

// ---------------------------------------------------------------------------
// trial / report

json timepoint_to_json(const stats::TimepointRow& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  return {{"bbt", opt(r.bbt)},
          {"crisscross", opt(r.crisscross)},
          {"move_match", opt(r.move_match)},
          {"thumbsense_missed", opt(r.thumbsense_missed)},
          {"hand_capacity", opt(r.hand_capacity)}};
}

stats::TimepointRow timepoint_from_json(const json& j) {
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  stats::TimepointRow r;
  r.bbt = opt("bbt");
  r.crisscross = opt("crisscross");
  r.move_match = opt("move_match");
  r.thumbsense_missed = opt("thumbsense_missed");
  r.hand_capacity = opt("hand_capacity");
  return r;
}

std::string ledger_to_json(const stats::TrialLedger& ledger) {
  json arr = json::array();
  for (const auto& rec : ledger.participants) {
    json weekly = json::object();
    for (const auto& [session, row] : rec.weekly)
      weekly[std::to_string(session)] = timepoint_to_json(row);
    arr.push_back({{"profile", profile_to_json_obj(rec.profile)},
                   {"baseline1", timepoint_to_json(rec.baseline1)},
                   {"baseline2", timepoint_to_json(rec.baseline2)},
                   {"post", timepoint_to_json(rec.post)},
                   {"follow_up", timepoint_to_json(rec.follow_up)},
                   {"weekly", weekly},
                   {"total_movements", rec.total_movements},
                   {"assisted_success", rec.assisted_success},
                   {"unassisted_success", rec.unassisted_success},
                   {"delta_bbt", rec.delta_bbt}});
  }
  return json{{"seed", ledger.seed}, {"participants", arr}}.dump(2) + "\n";
}

stats::TrialLedger ledger_from_json(const std::string& text) {
  const json j = json::parse(text);
  stats::TrialLedger ledger;
  ledger.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& pj : j.at("participants")) {
    stats::ParticipantRecord rec;
    rec.profile = profile_from_json_obj(pj.at("profile"));
    rec.baseline1 = timepoint_from_json(pj.at("baseline1"));
    rec.baseline2 = timepoint_from_json(pj.at("baseline2"));
    rec.post = timepoint_from_json(pj.at("post"));
    rec.follow_up = timepoint_from_json(pj.at("follow_up"));
    for (const auto& [key, row] : pj.at("weekly").items())
      rec.weekly[std::stoi(key)] = timepoint_from_json(row);
    rec.total_movements = pj.at("total_movements").get<int>();
    rec.assisted_success = pj.at("assisted_success").get<std::vector<double>>();
    rec.unassisted_success =
        pj.at("unassisted_success").get<std::vector<double>>();
    rec.delta_bbt = pj.at("delta_bbt").get<int>();
    ledger.participants.push_back(std::move(rec));
  }
  return ledger;
}

void write_report_bundle(const fs::path& dir, const stats::TrialLedger& ledger) {
  const auto rep = stats::make_report(ledger);
  atomic_write(dir / "table1.csv", rep.table1_csv);
  atomic_write(dir / "table2.csv", rep.table2_csv);
  atomic_write(dir / "fig4_rates.csv", rep.fig4_csv);
  atomic_write(dir / "summary.md", rep.summary_md);
}

int cmd_trial(int participants, std::uint64_t seed, const std::string& params,
              const std::string& cohort_path, int jobs, bool full_gameplay,
              const std::string& out_dir) {
  std::vector<patient::PatientProfile> cohort;
  if (!cohort_path.empty()) {
    cohort = patient::cohort_from_json(slurp(cohort_path));
  } else {
    if (participants < 18)
      throw std::runtime_error(
          "trial: need at least 18 participants (6 per arm)");
    patient::CohortSpec spec;
    spec.n = participants;
    core::SeededRng rng(seed, 3);
    cohort = patient::generate_cohort(spec, rng);
  }
  stats::TrialConfig cfg;
  cfg.jobs = jobs;
  cfg.simulate_gameplay = full_gameplay;
  if (!params.empty())
    cfg.outcome = defaults::outcome_params_from_json(slurp(params));

  const auto ledger = stats::run_virtual_trial(cohort, cfg, seed);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  atomic_write(dir / "cohort.json", patient::cohort_to_json(cohort) + "\n");
  atomic_write(dir / "ledger.json", ledger_to_json(ledger));
  write_report_bundle(dir, ledger);

  const auto rates = stats::responder_report(ledger);
  std::printf("trial complete: %zu participants, seed %llu\n",
              ledger.participants.size(),
              static_cast<unsigned long long>(ledger.seed));
  for (const auto& [g, rate] : rates.overall)
    std::printf("  %-13s responders: %5.1f%% (n=%d)\n",
                patient::to_string(g).c_str(), rate, rates.n_overall.at(g));
  std::printf("report bundle written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_dir) {
  const fs::path in(in_dir);
  const auto ledger = ledger_from_json(slurp(in / "ledger.json"));
  const fs::path dir = out_dir.empty() ? in : fs::path(out_dir);
  fs::create_directories(dir);
  write_report_bundle(dir, ledger);
  std::printf("report regenerated in %s\n", dir.string().c_str());
  return 0;
}

int cmd_cohort(int n, std::uint64_t seed, const std::string& out_path) {
  if (n < 1) throw std::runtime_error("cohort: n must be positive");
  patient::CohortSpec spec;
  spec.n = n;
  core::SeededRng rng(seed, 3);
  const auto cohort = patient::generate_cohort(spec, rng);
  const std::string doc = patient::cohort_to_json(cohort) + "\n";
  if (!out_path.empty())
    atomic_write(out_path, doc);
  else
    std::cout << doc;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finger: deterministic hand-rehabilitation simulation lab"};
  app.require_subcommand(1);

  // controller-demo
  double skill = 0.0;
  int movements = 5000;
  std::uint64_t seed = 1;
  std::string out_path, patient_path, which, in_dir, out_dir, params,
      cohort_path;
  auto* demo = app.add_subcommand("controller-demo",
                                  "run the adaptive gain staircase");
  demo->add_option("--patient-skill", skill, "responder skill offset");
  demo->add_option("--movements", movements, "number of movements (>= 100)");
  demo->add_option("--seed", seed, "random seed");
  demo->add_option("--out", out_path, "trace CSV path (default: stdout)");

  // assess
  auto* assess_cmd = app.add_subcommand("assess", "run one assessment");
  assess_cmd
      ->add_option("--which", which,
                   "crisscross|movematch|thumbsense|handcap")
      ->required();
  assess_cmd->add_option("--patient", patient_path,
                         "patient JSON (default: control profile)");
  assess_cmd->add_option("--seed", seed, "random seed");
  assess_cmd->add_option("--out", out_path, "scores CSV path");

  // eeg synth|process
  auto* eeg_cmd = app.add_subcommand("eeg", "synthetic EEG tools");
  eeg_cmd->require_subcommand(1);
  double pcnv_gain = 10.0, noise_rms = 2.0;
  int n_crossings = 100;
  auto* synth = eeg_cmd->add_subcommand("synth", "synthesize a recording");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--pcnv-gain", pcnv_gain, "ramp depth, uV per 2 s");
  synth->add_option("--noise-rms", noise_rms, "pink-noise RMS, uV");
  synth->add_option("--crossings", n_crossings, "number of crossings");
  auto* process = eeg_cmd->add_subcommand("process", "extract the pCNV");
  process->add_option("--in", in_dir, "recording directory")->required();
  process->add_option("--out", out_dir, "output directory")->required();
  process->add_option("--seed", seed, "random seed (ICA initialization)");

  // trial
  int participants = 45, jobs = 1;
  bool fast = false;
  auto* trial = app.add_subcommand("trial", "run a full virtual trial");
  trial->add_option("--participants", participants, "cohort size (>= 18)");
  trial->add_option("--seed", seed, "random seed");
  trial->add_option("--params", params, "outcome-model JSON overrides");
  trial->add_option("--cohort", cohort_path, "cohort JSON (skips generation)");
  trial->add_option("--jobs", jobs, "participant-level worker threads");
  trial->add_flag("--fast", fast,
                  "skip gameplay simulation (outcome model only)");
  trial->add_option("--out", out_dir, "report bundle directory")->required();

  // report
  auto* report = app.add_subcommand("report", "regenerate a report bundle");
  report->add_option("--in", in_dir, "directory holding ledger.json")
      ->required();
  report->add_option("--out", out_path, "output directory (default: --in)");

  // cohort
  auto* cohort = app.add_subcommand("cohort", "generate a cohort document");
  cohort->add_option("--n", participants, "cohort size");
  cohort->add_option("--seed", seed, "random seed");
  cohort->add_option("--out", out_path, "cohort JSON path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (demo->parsed())
      return cmd_controller_demo(skill, movements, seed, out_path);
    if (assess_cmd->parsed())
      return cmd_assess(which, patient_path, seed, out_path);
    if (synth->parsed())
      return cmd_eeg_synth(out_dir, seed, pcnv_gain, noise_rms, n_crossings);
    if (process->parsed()) return cmd_eeg_process(in_dir, out_dir, seed);
    if (trial->parsed())
      return cmd_trial(participants, seed, params, cohort_path, jobs, !fast,
                       out_dir);
    if (report->parsed()) return cmd_report(in_dir, out_path);
    if (cohort->parsed()) return cmd_cohort(participants, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
