#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finger/core.hpp"

namespace finger::eeg {

enum class EventKind { movement_onset, button_press, feedback_on };

struct Event {
  std::int64_t sample = 0;
  EventKind kind = EventKind::movement_onset;
};

/// Multichannel recording in microvolts, channels x samples, with
/// sample-indexed event markers.
struct EegRecording {
  std::vector<std::string> labels;
  double fs = 300.0;
  Eigen::MatrixXd data;  // channels x samples
  std::vector<Event> events;

  int channel_index(const std::string& label) const;  // -1 if absent
};

/// Standard 19-channel 10-20 montage (dry headset layout).
std::vector<std::string> default_montage();

// ---------------------------------------------------------------------------
// Filtering

/// Second-order sections, each row {b0,b1,b2,a1,a2} (a0 normalized to 1).
using SosMatrix = Eigen::Matrix<double, Eigen::Dynamic, 5>;

SosMatrix butterworth_lowpass(int order, double fc, double fs);
SosMatrix butterworth_highpass(int order, double fc, double fs);
SosMatrix notch(double f0, double fs, double q = 35.0);

/// Forward-backward (zero-phase) filtering with odd-reflect edge padding.
Eigen::VectorXd filtfilt(const SosMatrix& sos, const Eigen::VectorXd& x);

/// 60 Hz notch followed by a fourth-order 0.1-30 Hz Butterworth band-pass,
/// both applied forward-backward.
EegRecording notch_then_bandpass(const EegRecording& rec);

// ---------------------------------------------------------------------------
// ICA

struct IcaResult {
  Eigen::MatrixXd sources;    // components x samples
  Eigen::MatrixXd mixing;     // channels x components
  Eigen::MatrixXd unmixing;   // components x channels
  Eigen::VectorXd means;      // channel means removed before unmixing
  std::vector<bool> component_converged;
  bool converged = true;      // all components converged
};

/// FastICA (tanh contrast, deflation) on channels x samples data.
IcaResult fastica(const Eigen::MatrixXd& x, int n_components,
                  core::SeededRng& rng, int max_iter = 200, double tol = 1e-8);

struct EyeRemovalReport {
  std::vector<int> removed_components;
  bool ica_converged = true;
};

/// ICA denoising: components whose activation correlates |r| > 0.7 with the
/// frontal blink reference are zeroed. When the blink-correlated components
/// fail to converge the input is passed through unchanged and the report
/// says so. (Trailing noise-subspace components are near-Gaussian and are
/// not expected to converge; they never gate removal.)
std::pair<EegRecording, EyeRemovalReport> remove_eye_artifacts(
    const EegRecording& rec, core::SeededRng& rng);

/// Blink reference: low-passed frontal mean, gated to blink-scale transients.
Eigen::VectorXd blink_reference(const EegRecording& rec);

// ---------------------------------------------------------------------------
// Epoching and rejection

struct EpochSet {
  std::vector<std::string> labels;
  double fs = 300.0;
  int pre_samples = 0;  // samples before the onset within each epoch
  std::vector<Eigen::MatrixXd> epochs;  // per epoch: channels x samples

  int n_epochs() const { return static_cast<int>(epochs.size()); }
  int n_channels() const { return static_cast<int>(labels.size()); }
};

constexpr double kEpochPreSeconds = 0.250;
constexpr double kEpochPostSeconds = 3.000;
constexpr double kBaselineStartSeconds = -0.250;
constexpr double kBaselineEndSeconds = -0.050;

/// Windows -250 ms..3000 ms around each movement onset, baseline corrected
/// over [-250, -50] ms.
EpochSet extract_epochs(const EegRecording& rec);

struct RejectionConfig {
  double abs_threshold_uv = 100.0;   // stage 1: absolute amplitude
  double step_threshold_uv = 50.0;   // stage 1: sample-to-sample change
  double mad_multiplier = 3.0;       // stage 2
  double channel_exclusion_fraction = 0.5;
};

struct RejectionReport {
  // kept(ch, ep): whether channel ch retains epoch ep
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> kept;
  std::vector<bool> channel_excluded;
  double overall_rejection_fraction = 0.0;
};

RejectionReport epoch_reject(const EpochSet& es, const RejectionConfig& cfg = {});

// ---------------------------------------------------------------------------
// pCNV

struct PcnvResult {
  // electrode -> mean amplitude over 0.5-1.0 s post onset; nullopt when
  // fewer than the minimum epochs survive
  std::map<std::string, std::optional<double>> amplitude_uv;
  std::map<std::string, int> kept_epochs;
  std::map<std::string, int> rejected_epochs;

  std::string to_csv() const;
};

constexpr double kPcnvWindowStart = 0.5;
constexpr double kPcnvWindowEnd = 1.0;
constexpr int kPcnvMinEpochs = 10;

PcnvResult pcnv(const EpochSet& es, const RejectionReport& rej,
                const std::vector<std::string>& electrodes = {"Fz", "F3", "Cz",
                                                              "C3", "Pz", "P3"});

enum class AffectedSide { left, right };

/// Swaps lateral electrode pairs so left-hemisphere labels always
/// correspond to the hand in the robot. Right-affected is the reference
/// configuration (identity); applying twice is the identity.
EegRecording mirror_electrodes(const EegRecording& rec, AffectedSide side);

// ---------------------------------------------------------------------------
// Synthesis

struct SynthConfig {
  double pcnv_gain_uv = 10.0;   // ramp depth per 2 s of anticipation
  double noise_rms_uv = 2.0;    // pink background noise per channel
  double line_amp_uv = 3.0;     // 60 Hz line
  double blink_rate_hz = 0.08;  // frontal blink transients
  double blink_amp_uv = 80.0;
  double latency_mean_s = 0.25;
  double latency_sd_s = 0.03;
  int n_crossings = 100;        // five runs of twenty
  double speed_lo = 8.0, speed_hi = 18.0;
};

struct SynthOutput {
  EegRecording recording;
  // per crossing: robot-driven finger trajectories (times relative to onset)
  std::vector<std::pair<core::Trajectory, core::Trajectory>> kinematics;
  std::vector<double> press_times;  // absolute, seconds
  std::vector<double> speeds;
};

/// Synthetic Crisscross-with-feedback recording: pink noise + 60 Hz line +
/// frontal blinks + a parietal-weighted anticipatory ramp from movement
/// onset to button press, rebounding positively after the press. Feedback
/// markers land ~83 ms after each press.
SynthOutput synth_recording(const SynthConfig& cfg, core::SeededRng& rng);

// ---------------------------------------------------------------------------
// Kinematic correlation

struct CorrelationMap {
  std::vector<std::string> channels;
  std::vector<std::string> regressors;
  Eigen::MatrixXd r;  // channels x regressors; NaN for zero-variance rows

  std::string to_csv() const;
};

/// Pearson r between every channel and task regressors (finger angles,
/// separation, relative velocity, error) resampled to the EEG clock.
CorrelationMap kinematic_correlation_map(const EegRecording& rec,
                                         const SynthOutput& task);

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// ---------------------------------------------------------------------------
// Recording I/O: CSV data + JSON sidecar (labels, fs, events)

void save_recording(const EegRecording& rec, const std::string& data_path,
                    const std::string& sidecar_path);
EegRecording load_recording(const std::string& data_path,
                            const std::string& sidecar_path);

}  // namespace finger::eeg
