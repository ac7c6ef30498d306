#include <cmath>
#include <stdexcept>

#include "finger/eeg.hpp"

namespace finger::eeg {

int EegRecording::channel_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> default_montage() {
  return {"Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T3", "C3", "Cz",
          "C4",  "T4",  "T5", "P3", "Pz", "P4", "T6", "O1", "O2"};
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

SosMatrix to_sos(const std::vector<Biquad>& sections) {
  SosMatrix sos(sections.size(), 5);
  for (std::size_t i = 0; i < sections.size(); ++i) {
    sos(i, 0) = sections[i].b0;
    sos(i, 1) = sections[i].b1;
    sos(i, 2) = sections[i].b2;
    sos(i, 3) = sections[i].a1;
    sos(i, 4) = sections[i].a2;
  }
  return sos;
}

// Butterworth pole quality factors for an even-order cascade.
std::vector<double> butterworth_q(int order) {
  if (order < 2 || order % 2 != 0)
    throw std::invalid_argument("butterworth: order must be even and >= 2");
  std::vector<double> qs;
  for (int k = 1; k <= order / 2; ++k) {
    const double theta = (2.0 * k - 1.0) * M_PI / (2.0 * order);
    qs.push_back(1.0 / (2.0 * std::sin(theta)));
  }
  return qs;
}

void check_freq(double fc, double fs) {
  if (fs <= 0 || fc <= 0 || fc >= fs / 2)
    throw std::invalid_argument("filter design: cutoff outside (0, fs/2)");
}

}  // namespace

SosMatrix butterworth_lowpass(int order, double fc, double fs) {
  check_freq(fc, fs);
  const double w0 = 2.0 * M_PI * fc / fs;
  const double cw = std::cos(w0), sw = std::sin(w0);
  std::vector<Biquad> sections;
  for (double q : butterworth_q(order)) {
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    sections.push_back({(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0,
                        (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0,
                        (1.0 - alpha) / a0});
  }
  return to_sos(sections);
}

SosMatrix butterworth_highpass(int order, double fc, double fs) {
  check_freq(fc, fs);
  const double w0 = 2.0 * M_PI * fc / fs;
  const double cw = std::cos(w0), sw = std::sin(w0);
  std::vector<Biquad> sections;
  for (double q : butterworth_q(order)) {
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    sections.push_back({(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0,
                        (1.0 + cw) / 2.0 / a0, -2.0 * cw / a0,
                        (1.0 - alpha) / a0});
  }
  return to_sos(sections);
}

SosMatrix notch(double f0, double fs, double q) {
  check_freq(f0, fs);
  const double w0 = 2.0 * M_PI * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  SosMatrix sos(1, 5);
  sos << 1.0 / a0, -2.0 * std::cos(w0) / a0, 1.0 / a0, -2.0 * std::cos(w0) / a0,
      (1.0 - alpha) / a0;
  return sos;
}

namespace {

// steady-state DF2T state for a unit-step input, scaled later by x[0]
void steady_state_zi(const SosMatrix& sos, int i, double& z1, double& z2) {
  const double b0 = sos(i, 0), b1 = sos(i, 1), b2 = sos(i, 2);
  const double a1 = sos(i, 3), a2 = sos(i, 4);
  const double k = (b0 + b1 + b2) / (1.0 + a1 + a2);
  z2 = b2 - a2 * k;
  z1 = b1 - a1 * k + z2;
}

void sosfilt_forward(const SosMatrix& sos, Eigen::VectorXd& x) {
  double scale = x.size() > 0 ? x(0) : 0.0;
  for (int s = 0; s < sos.rows(); ++s) {
    double z1, z2;
    steady_state_zi(sos, s, z1, z2);
    z1 *= scale;
    z2 *= scale;
    const double b0 = sos(s, 0), b1 = sos(s, 1), b2 = sos(s, 2);
    const double a1 = sos(s, 3), a2 = sos(s, 4);
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double in = x(n);
      const double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      x(n) = out;
    }
    scale = x.size() > 0 ? x(0) : 0.0;
  }
}

}  // namespace

Eigen::VectorXd filtfilt(const SosMatrix& sos, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index order = 2 * sos.rows();
  const Eigen::Index padlen = std::min<Eigen::Index>(n - 1, 3 * (order + 1));
  if (n <= 3 * order)
    throw std::invalid_argument("filtfilt: signal shorter than 3x filter order");

  // odd reflection about both endpoints
  Eigen::VectorXd ext(n + 2 * padlen);
  for (Eigen::Index i = 0; i < padlen; ++i)
    ext(i) = 2.0 * x(0) - x(padlen - i);
  ext.segment(padlen, n) = x;
  for (Eigen::Index i = 0; i < padlen; ++i)
    ext(padlen + n + i) = 2.0 * x(n - 1) - x(n - 2 - i);

  sosfilt_forward(sos, ext);
  ext.reverseInPlace();
  sosfilt_forward(sos, ext);
  ext.reverseInPlace();
  return ext.segment(padlen, n);
}

EegRecording notch_then_bandpass(const EegRecording& rec) {
  const SosMatrix nt = notch(60.0, rec.fs);
  const SosMatrix hp = butterworth_highpass(4, 0.1, rec.fs);
  const SosMatrix lp = butterworth_lowpass(4, 30.0, rec.fs);
  EegRecording out = rec;
  for (Eigen::Index ch = 0; ch < out.data.rows(); ++ch) {
    Eigen::VectorXd sig = out.data.row(ch);
    sig = filtfilt(nt, sig);
    sig = filtfilt(hp, sig);
    sig = filtfilt(lp, sig);
    out.data.row(ch) = sig;
  }
  return out;
}

}  // namespace finger::eeg
