#include <cmath>

#include "doctest.h"
#include "finger/assess.hpp"

using namespace finger;

namespace {

patient::PatientProfile deterministic(double latency) {
  patient::PatientProfile p;
  p.prop_noise_sd = 0.0;
  p.latency_mean = latency;
  p.latency_sd = 0.0;
  p.motor_noise_sd = 0.0;
  return p;
}

}  // namespace

TEST_CASE("crisscross: pure-latency error is 2 x speed x latency") {
  const auto p = deterministic(0.30);
  core::SeededRng rng(5, 0);
  const auto res = assess::run_crisscross(p, rng);
  REQUIRE(res.trials.size() == 20);
  for (const auto& tr : res.trials) {
    REQUIRE(tr.press_time.has_value());
    CHECK(tr.error_deg ==
          doctest::Approx(2.0 * tr.speed * 0.30).epsilon(1e-6));
  }
}

TEST_CASE("crisscross: speeds are a stratified cover of [8, 18]") {
  const auto p = deterministic(0.2);
  core::SeededRng rng(6, 0);
  const auto res = assess::run_crisscross(p, rng);
  std::vector<double> speeds;
  for (const auto& tr : res.trials) speeds.push_back(tr.speed);
  std::sort(speeds.begin(), speeds.end());
  for (int i = 0; i < 20; ++i)
    CHECK(speeds[i] == doctest::Approx(8.0 + 10.0 * i / 19.0).epsilon(1e-9));
}

TEST_CASE("crisscross: perfect participant scores zero") {
  const auto p = deterministic(0.0);
  core::SeededRng rng(7, 0);
  const auto res = assess::run_crisscross(p, rng);
  CHECK(res.mean_abs_error == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("crisscross: absent presses score the end-of-trial separation") {
  auto p = deterministic(1000.0);  // presses far beyond any trial span
  core::SeededRng rng(8, 0);
  const auto res = assess::run_crisscross(p, rng);
  for (const auto& tr : res.trials) {
    CHECK(!tr.press_time.has_value());
    CHECK(tr.error_deg == doctest::Approx(42.0).epsilon(1e-9));
  }
}

TEST_CASE("impairment threshold: mean + 2 sd of the control cohort") {
  const assess::ImpairmentThreshold thr;
  CHECK(thr.threshold() == doctest::Approx(12.80).epsilon(1e-12));
  CHECK(!assess::classify_impairment(12.80));
  CHECK(assess::classify_impairment(12.9));
  CHECK(!assess::classify_impairment(5.0));
}

TEST_CASE("control cohort lands inside the published control range") {
  // [DERIVED] 100-seed Monte Carlo of the control profile; run means must
  // stay within the observed control band and average near 7.7 deg.
  double total = 0.0;
  double lo = 1e9, hi = -1e9;
  for (int seed = 0; seed < 100; ++seed) {
    core::SeededRng rng(seed, 4);
    const auto res = assess::run_crisscross(patient::control_profile(), rng);
    total += res.mean_abs_error;
    lo = std::min(lo, res.mean_abs_error);
    hi = std::max(hi, res.mean_abs_error);
  }
  const double grand = total / 100.0;
  CHECK(grand > 5.1);
  CHECK(grand < 10.2);
  CHECK(std::abs(grand - 7.68) < 1.5);
}

TEST_CASE("move and match: noiseless lag gives lag x speed error") {
  // [DERIVED] tracking a 10 deg/s triangle wave with pure reaction lag:
  // error = speed x lag except near turnarounds, so the time average is
  // slightly below speed x lag.
  auto p = deterministic(0.30);
  core::SeededRng rng(9, 0);
  const double err = assess::run_move_match(p, rng);
  CHECK(err > 0.8 * 10.0 * 0.30);
  CHECK(err <= 10.0 * 0.30 + 1e-9);
  // and error grows with noise
  auto q = deterministic(0.30);
  q.prop_noise_sd = 6.0;
  core::SeededRng rng2(9, 0);
  CHECK(assess::run_move_match(q, rng2) > err);
}

TEST_CASE("thumbsense: perfect perception scores 100%") {
  auto p = deterministic(0.2);
  core::SeededRng rng(10, 0);
  const auto res = assess::run_thumbsense(p, rng, 30);
  CHECK(res.n_trials == 30);
  CHECK(res.percent_accuracy == doctest::Approx(100.0));
}

TEST_CASE("thumbsense: overwhelming noise decays toward chance") {
  auto p = deterministic(0.2);
  p.prop_noise_sd = 2000.0;
  double total = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    core::SeededRng rng(seed, 6);
    total += assess::run_thumbsense(p, rng, 30).percent_accuracy;
  }
  CHECK(std::abs(total / 50.0 - 100.0 / 3.0) < 6.0);
}

TEST_CASE("thumbsense: trial count is validated") {
  auto p = deterministic(0.2);
  core::SeededRng rng(1, 0);
  CHECK_THROWS_AS(assess::run_thumbsense(p, rng, 5), std::invalid_argument);
  CHECK_THROWS_AS(assess::run_thumbsense(p, rng, 31), std::invalid_argument);
}

TEST_CASE("hand capacity: shoelace area oracles") {
  const std::vector<std::pair<double, double>> unit_square = {
      {0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(assess::hand_capacity(unit_square) == doctest::Approx(1.0));
  CHECK(assess::hand_capacity(unit_square, 2.0) == doctest::Approx(0.5));

  // translation invariance
  std::vector<std::pair<double, double>> shifted;
  for (auto [x, y] : unit_square) shifted.emplace_back(x + 3.5, y - 2.0);
  CHECK(assess::hand_capacity(shifted) == doctest::Approx(1.0));

  // quadratic scaling
  std::vector<std::pair<double, double>> doubled;
  for (auto [x, y] : unit_square) doubled.emplace_back(2 * x, 2 * y);
  CHECK(assess::hand_capacity(doubled) == doctest::Approx(4.0));

  // orientation independence
  std::vector<std::pair<double, double>> reversed(unit_square.rbegin(),
                                                  unit_square.rend());
  CHECK(assess::hand_capacity(reversed) == doctest::Approx(1.0));
}

TEST_CASE("hand capacity: rejects degenerate or self-intersecting boundaries") {
  CHECK_THROWS_AS(assess::hand_capacity({{0, 0}, {1, 1}}), std::invalid_argument);
  const std::vector<std::pair<double, double>> collinear = {
      {0, 0}, {1, 0}, {2, 0}};
  CHECK_THROWS_AS(assess::hand_capacity(collinear), std::invalid_argument);
  const std::vector<std::pair<double, double>> bowtie = {
      {0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(assess::hand_capacity(bowtie), std::invalid_argument);
}

TEST_CASE("assessment schedule: exact weekly pattern") {
  using assess::Assessment;
  const std::set<Assessment> week_first = {Assessment::thumbsense,
                                           Assessment::tuning};
  const std::set<Assessment> week_second = {Assessment::move_match,
                                            Assessment::bbt};
  const std::set<Assessment> week_third = {Assessment::crisscross,
                                           Assessment::unassisted_gameplay};
  for (int s : {1, 4, 7}) CHECK(assess::assessment_schedule(s) == week_first);
  for (int s : {2, 5, 8}) CHECK(assess::assessment_schedule(s) == week_second);
  for (int s : {3, 6, 9}) CHECK(assess::assessment_schedule(s) == week_third);
}
