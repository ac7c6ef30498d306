#include <cmath>

#include "doctest.h"
#include "finger/eeg.hpp"

using namespace finger;

namespace {

Eigen::VectorXd sine(double f, double fs, int n, double amp = 1.0,
                     double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = amp * std::sin(2.0 * M_PI * f * i / fs + phase);
  return x;
}

double rms(const Eigen::VectorXd& x) {
  return std::sqrt(x.squaredNorm() / x.size());
}

// steady-state gain through the full notch + band-pass chain at frequency f,
// measured by quadrature projection so edge transients cannot leak in
double chain_gain(double f, double fs) {
  eeg::EegRecording rec;
  rec.labels = {"Cz"};
  rec.fs = fs;
  const int n = static_cast<int>(20 * fs);
  rec.data = sine(f, fs, n).transpose();
  const auto out = eeg::notch_then_bandpass(rec);
  const int lo = n / 4, len = n / 2;
  double si = 0.0, co = 0.0;
  for (int i = 0; i < len; ++i) {
    const double y = out.data(0, lo + i);
    si += y * std::sin(2.0 * M_PI * f * (lo + i) / fs);
    co += y * std::cos(2.0 * M_PI * f * (lo + i) / fs);
  }
  return std::hypot(2.0 * si / len, 2.0 * co / len);
}

}  // namespace

TEST_CASE("butterworth sections: expected count and stability") {
  const auto lp = eeg::butterworth_lowpass(4, 30.0, 300.0);
  CHECK(lp.rows() == 2);
  const auto hp = eeg::butterworth_highpass(4, 0.1, 300.0);
  CHECK(hp.rows() == 2);
  // poles inside the unit circle: |a2| < 1 and |a1| < 1 + a2 per section
  for (const auto& sos : {lp, hp}) {
    for (Eigen::Index r = 0; r < sos.rows(); ++r) {
      CHECK(std::abs(sos(r, 4)) < 1.0);
      CHECK(std::abs(sos(r, 3)) < 1.0 + sos(r, 4) + 1e-12);
    }
  }
}

TEST_CASE("filter chain: DC is removed") {
  eeg::EegRecording rec;
  rec.labels = {"Cz"};
  rec.fs = 300.0;
  const int n = 6000;
  rec.data = Eigen::MatrixXd::Constant(1, n, 25.0);
  const auto out = eeg::notch_then_bandpass(rec);
  CHECK(rms(out.data.row(0).segment(n / 4, n / 2).transpose()) < 0.25);
}

TEST_CASE("filter chain: >= 40 dB attenuation at 60 Hz") {
  const double g = chain_gain(60.0, 300.0);
  CHECK(20.0 * std::log10(g) < -40.0);
}

TEST_CASE("filter chain: 10 Hz passes with unity gain and zero lag") {
  const double g = chain_gain(10.0, 300.0);
  CHECK(std::abs(g - 1.0) < 0.05);

  // zero-phase check: peak cross-correlation with the input at zero lag
  const double fs = 300.0;
  const int n = static_cast<int>(20 * fs);
  eeg::EegRecording rec;
  rec.labels = {"Cz"};
  rec.fs = fs;
  rec.data = sine(10.0, fs, n).transpose();
  const auto out = eeg::notch_then_bandpass(rec);
  const int lo = n / 4, len = n / 2;
  const Eigen::VectorXd y = out.data.row(0).segment(lo, len).transpose();
  int best_lag = -99;
  double best = -1e18;
  for (int lag = -10; lag <= 10; ++lag) {
    double acc = 0.0;
    for (int i = 0; i < len; ++i) acc += y(i) * rec.data(0, lo + i + lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("notch filter: narrow stopband leaves 50 and 70 Hz mostly alone") {
  const double fs = 300.0;
  const auto sos = eeg::notch(60.0, fs);
  const int n = 6000;
  const Eigen::VectorXd at60 = eeg::filtfilt(sos, sine(60.0, fs, n));
  const Eigen::VectorXd at50 = eeg::filtfilt(sos, sine(50.0, fs, n));
  CHECK(rms(at60.segment(n / 4, n / 2)) < 0.01);
  CHECK(rms(at50.segment(n / 4, n / 2)) > 0.9 * rms(sine(50.0, fs, n)));
}

TEST_CASE("filtfilt: linearity") {
  const auto sos = eeg::butterworth_lowpass(4, 30.0, 300.0);
  core::SeededRng rng(17, 0);
  Eigen::VectorXd a(2000), b(2000);
  for (int i = 0; i < 2000; ++i) {
    a(i) = rng.normal();
    b(i) = rng.normal();
  }
  const Eigen::VectorXd fa = eeg::filtfilt(sos, a);
  const Eigen::VectorXd fb = eeg::filtfilt(sos, b);
  const Eigen::VectorXd fab = eeg::filtfilt(sos, 2.0 * a + 3.0 * b);
  CHECK((fab - 2.0 * fa - 3.0 * fb).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("filtfilt: rejects inputs shorter than the padding") {
  const auto sos = eeg::butterworth_lowpass(4, 30.0, 300.0);
  Eigen::VectorXd tiny = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(eeg::filtfilt(sos, tiny), std::invalid_argument);
}

TEST_CASE("butterworth factories validate their arguments") {
  CHECK_THROWS_AS(eeg::butterworth_lowpass(3, 30.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(eeg::butterworth_lowpass(4, 200.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(eeg::butterworth_highpass(4, -1.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(eeg::notch(60.0, 100.0), std::invalid_argument);
}
