#include <cmath>
#include <map>

#include "finger/eeg.hpp"

namespace finger::eeg {

namespace {

// anticipatory ramp weights: parietal apex, contralateral emphasis
const std::map<std::string, double>& pcnv_weights() {
  static const std::map<std::string, double> w = {
      {"P3", 1.0}, {"Pz", 1.0}, {"C3", 0.8},
      {"Cz", 0.6}, {"F3", 0.3}, {"Fz", 0.2}};
  return w;
}

const std::map<std::string, double>& blink_weights() {
  static const std::map<std::string, double> w = {
      {"Fp1", 1.0}, {"Fp2", 1.0}, {"F7", 0.5}, {"F8", 0.5},
      {"F3", 0.4},  {"F4", 0.4},  {"Fz", 0.35}};
  return w;
}

// Paul Kellett's economy pink-noise filter over unit white noise
Eigen::RowVectorXd pink_noise(Eigen::Index n, double rms, core::SeededRng& rng) {
  if (rms <= 0) return Eigen::RowVectorXd::Zero(n);
  double b0 = 0, b1 = 0, b2 = 0;
  Eigen::RowVectorXd pink(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double white = rng.normal();
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    pink(i) = b0 + b1 + b2 + white * 0.1848;
  }
  const double have = std::sqrt(pink.squaredNorm() / n);
  if (have > 0) pink *= rms / have;
  return pink;
}

}  // namespace

SynthOutput synth_recording(const SynthConfig& cfg, core::SeededRng& rng) {
  if (cfg.pcnv_gain_uv < 0)
    throw std::invalid_argument("synth_recording: negative pcnv gain");
  const double fs = 300.0;
  const core::Workspace ws{12.0, 54.0};

  // pseudorandomized speeds: stratified per run of 20, shuffled
  std::vector<double> speeds;
  const int runs = (cfg.n_crossings + 19) / 20;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> run(20);
    for (int i = 0; i < 20; ++i)
      run[i] = cfg.speed_lo + (cfg.speed_hi - cfg.speed_lo) * i / 19.0;
    for (int i = 19; i > 0; --i) std::swap(run[i], run[rng.uniform_int(0, i)]);
    speeds.insert(speeds.end(), run.begin(), run.end());
  }
  speeds.resize(cfg.n_crossings);

  // lay out the trial timeline
  struct Trial {
    double onset, duration, press, feedback;
  };
  std::vector<Trial> trials;
  double cursor = 2.0;
  for (double s : speeds) {
    cursor += rng.uniform(1.5, 3.0);  // unpredictable inter-trial gap
    const double duration = ws.span() / s;
    const double t_cross = 0.5 * ws.span() / s;
    double latency = cfg.latency_mean_s;
    if (cfg.latency_sd_s > 0)
      latency = std::max(0.05, rng.normal(cfg.latency_mean_s, cfg.latency_sd_s));
    const double press = cursor + t_cross + latency;
    trials.push_back({cursor, duration, press, press + 0.083});
    cursor += duration;
  }
  const double total_s = cursor + 4.0;
  const auto n_samples = static_cast<Eigen::Index>(std::ceil(total_s * fs));

  SynthOutput out;
  out.recording.labels = default_montage();
  out.recording.fs = fs;
  out.recording.data = Eigen::MatrixXd::Zero(19, n_samples);
  out.speeds = speeds;

  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& tr = trials[i];
    out.recording.events.push_back(
        {static_cast<std::int64_t>(std::llround(tr.onset * fs)), EventKind::movement_onset});
    out.recording.events.push_back(
        {static_cast<std::int64_t>(std::llround(tr.press * fs)), EventKind::button_press});
    out.recording.events.push_back(
        {static_cast<std::int64_t>(std::llround(tr.feedback * fs)), EventKind::feedback_on});
    auto [rising, falling, t_cross] =
        core::crossing_pattern(ws.min_deg, ws.max_deg, speeds[i], 1.0 / fs);
    out.kinematics.emplace_back(std::move(rising), std::move(falling));
    out.press_times.push_back(tr.press);
  }
  std::sort(out.recording.events.begin(), out.recording.events.end(),
            [](const Event& a, const Event& b) { return a.sample < b.sample; });

  // anticipatory ramp: cfg.pcnv_gain_uv of negativity per 2 s, from movement
  // onset until the press, then a positive rebound
  Eigen::RowVectorXd ramp = Eigen::RowVectorXd::Zero(n_samples);
  for (const auto& tr : trials) {
    const auto i0 = static_cast<Eigen::Index>(std::llround(tr.onset * fs));
    const auto ip = static_cast<Eigen::Index>(std::llround(tr.press * fs));
    const double v_press = -cfg.pcnv_gain_uv * (tr.press - tr.onset) / 2.0;
    for (Eigen::Index k = i0; k < std::min(ip, n_samples); ++k) {
      const double t = k / fs - tr.onset;
      ramp(k) += -cfg.pcnv_gain_uv * t / 2.0;
    }
    // rebound: linear rise to a small positive peak, then exponential decay
    const double peak = 0.15 * cfg.pcnv_gain_uv;
    const double rise = 0.4, tau = 0.3;
    for (Eigen::Index k = ip; k < n_samples; ++k) {
      const double t = k / fs - tr.press;
      double v;
      if (t < rise) {
        v = v_press + (peak - v_press) * t / rise;
      } else {
        v = peak * std::exp(-(t - rise) / tau);
        if (v < 1e-3 * cfg.pcnv_gain_uv) break;
      }
      ramp(k) += v;
    }
  }

  // blink train shared by frontal channels
  Eigen::RowVectorXd blinks = Eigen::RowVectorXd::Zero(n_samples);
  if (cfg.blink_rate_hz > 0 && cfg.blink_amp_uv > 0) {
    double t = -std::log(1.0 - rng.uniform()) / cfg.blink_rate_hz;
    const int blink_len = static_cast<int>(0.4 * fs);
    while (t < total_s) {
      const auto i0 = static_cast<Eigen::Index>(t * fs);
      for (int k = 0; k < blink_len && i0 + k < n_samples; ++k) {
        const double ph = static_cast<double>(k) / blink_len;
        blinks(i0 + k) += cfg.blink_amp_uv * 0.5 * (1.0 - std::cos(2.0 * M_PI * ph));
      }
      t += -std::log(1.0 - rng.uniform()) / cfg.blink_rate_hz;
    }
  }

  for (int ch = 0; ch < 19; ++ch) {
    const std::string& lbl = out.recording.labels[ch];
    auto row = out.recording.data.row(ch);
    row += pink_noise(n_samples, cfg.noise_rms_uv, rng);
    if (cfg.line_amp_uv > 0) {
      const double phase = rng.uniform(0.0, 2.0 * M_PI);
      for (Eigen::Index k = 0; k < n_samples; ++k)
        row(k) += cfg.line_amp_uv * std::sin(2.0 * M_PI * 60.0 * k / fs + phase);
    }
    if (auto it = pcnv_weights().find(lbl); it != pcnv_weights().end())
      row += it->second * ramp;
    if (auto it = blink_weights().find(lbl); it != blink_weights().end())
      row += it->second * blinks;
  }
  return out;
}

}  // namespace finger::eeg
