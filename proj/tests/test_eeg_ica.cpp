#include <cmath>

#include "doctest.h"
#include "finger/eeg.hpp"

using namespace finger;

namespace {

// deterministic non-Gaussian sources: sine, sawtooth, uniform noise
Eigen::MatrixXd make_sources(int n, core::SeededRng& rng) {
  Eigen::MatrixXd s(3, n);
  for (int i = 0; i < n; ++i) {
    s(0, i) = std::sin(2.0 * M_PI * 5.0 * i / 300.0);
    s(1, i) = 2.0 * (i % 77) / 77.0 - 1.0;
    s(2, i) = rng.uniform(-1.0, 1.0);
  }
  return s;
}

}  // namespace

TEST_CASE("pearson: exact oracles") {
  Eigen::VectorXd a(4), b(4);
  a << 1, 2, 3, 4;
  b << 2, 4, 6, 8;
  CHECK(eeg::pearson(a, a) == doctest::Approx(1.0));
  CHECK(eeg::pearson(a, b) == doctest::Approx(1.0));
  CHECK(eeg::pearson(a, (-b).eval()) == doctest::Approx(-1.0));
  Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 3.0);
  CHECK(std::isnan(eeg::pearson(a, c)));
  Eigen::VectorXd short_v(2);
  CHECK_THROWS_AS(eeg::pearson(a, short_v), std::invalid_argument);
}

TEST_CASE("fastica: recovers a 3-source mixture up to sign and order") {
  const int n = 6000;
  core::SeededRng rng(41, 0);
  const Eigen::MatrixXd s = make_sources(n, rng);
  Eigen::MatrixXd mix(3, 3);
  mix << 0.9, 0.3, -0.4, 0.2, 1.1, 0.5, -0.6, 0.4, 0.8;
  const Eigen::MatrixXd x = mix * s;

  core::SeededRng ica_rng(42, 0);
  const auto res = eeg::fastica(x, 3, ica_rng);
  REQUIRE(res.converged);
  REQUIRE(res.sources.rows() == 3);

  for (int true_c = 0; true_c < 3; ++true_c) {
    double best = 0.0;
    for (int c = 0; c < 3; ++c) {
      best = std::max(best, std::abs(eeg::pearson(res.sources.row(c).transpose(),
                                                  s.row(true_c).transpose())));
    }
    CHECK(best > 0.95);
  }
}

TEST_CASE("fastica: mixing x sources reconstructs the input") {
  const int n = 4000;
  core::SeededRng rng(43, 0);
  const Eigen::MatrixXd s = make_sources(n, rng);
  Eigen::MatrixXd mix(3, 3);
  mix << 1.0, 0.2, 0.1, -0.3, 0.9, 0.4, 0.2, -0.5, 1.2;
  const Eigen::MatrixXd x = mix * s;
  core::SeededRng ica_rng(44, 0);
  const auto res = eeg::fastica(x, 3, ica_rng);
  REQUIRE(res.converged);
  Eigen::MatrixXd rebuilt = res.mixing * res.sources;
  rebuilt.colwise() += res.means;
  CHECK((rebuilt - x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fastica: validates the component count") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 100);
  core::SeededRng rng(1, 0);
  CHECK_THROWS_AS(eeg::fastica(x, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(eeg::fastica(x, 4, rng), std::invalid_argument);
}

TEST_CASE("blink reference: zero without blink-scale transients") {
  eeg::SynthConfig cfg;
  cfg.blink_rate_hz = 0.0;
  cfg.n_crossings = 20;
  core::SeededRng rng(45, 0);
  const auto out = eeg::synth_recording(cfg, rng);
  const Eigen::VectorXd ref = eeg::blink_reference(out.recording);
  CHECK(ref.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("remove_eye_artifacts: blink-free recordings pass through unchanged") {
  eeg::SynthConfig cfg;
  cfg.blink_rate_hz = 0.0;
  cfg.n_crossings = 20;
  core::SeededRng rng(46, 0);
  const auto out = eeg::synth_recording(cfg, rng);
  core::SeededRng ica_rng(47, 0);
  const auto [cleaned, report] = eeg::remove_eye_artifacts(out.recording, ica_rng);
  CHECK(report.removed_components.empty());
  CHECK(report.ica_converged);
  CHECK((cleaned.data - out.recording.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("remove_eye_artifacts: suppresses frontal blink transients") {
  eeg::SynthConfig cfg;
  cfg.blink_rate_hz = 0.2;
  cfg.n_crossings = 20;
  core::SeededRng rng(48, 0);
  const auto out = eeg::synth_recording(cfg, rng);
  const Eigen::VectorXd ref = eeg::blink_reference(out.recording);
  REQUIRE(ref.cwiseAbs().maxCoeff() > 0.0);

  const int fp1 = out.recording.channel_index("Fp1");
  const double before =
      std::abs(eeg::pearson(out.recording.data.row(fp1).transpose(), ref));
  REQUIRE(before > 0.8);

  core::SeededRng ica_rng(49, 0);
  const auto [cleaned, report] = eeg::remove_eye_artifacts(out.recording, ica_rng);
  REQUIRE(report.ica_converged);
  CHECK(!report.removed_components.empty());
  const double after =
      std::abs(eeg::pearson(cleaned.data.row(fp1).transpose(), ref));
  CHECK(after < 0.3);
  // non-frontal channels keep their signal content
  const int pz = out.recording.channel_index("Pz");
  const double retained = eeg::pearson(cleaned.data.row(pz).transpose(),
                                       out.recording.data.row(pz).transpose());
  CHECK(retained > 0.9);
}

TEST_CASE("remove_eye_artifacts: input validation") {
  eeg::EegRecording rec;
  rec.labels = {"Cz"};
  rec.fs = 300.0;
  rec.data = Eigen::MatrixXd::Zero(1, 30000);
  core::SeededRng rng(1, 0);
  CHECK_THROWS_AS(eeg::remove_eye_artifacts(rec, rng), std::invalid_argument);

  eeg::EegRecording short_rec;
  short_rec.labels = eeg::default_montage();
  short_rec.fs = 300.0;
  short_rec.data = Eigen::MatrixXd::Zero(19, 1000);
  CHECK_THROWS_AS(eeg::remove_eye_artifacts(short_rec, rng), std::invalid_argument);
}
