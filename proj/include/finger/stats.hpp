#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finger/assess.hpp"
#include "finger/core.hpp"
#include "finger/games.hpp"
#include "finger/patient.hpp"

namespace finger::stats {

enum class Tail { two_sided, less, greater };

enum class Method {
  wilcoxon_signed_rank_exact,
  wilcoxon_signed_rank_normal,
  wilcoxon_rank_sum_exact,
  wilcoxon_rank_sum_normal,
  kruskal_wallis_chi2,
  friedman_chi2,
  linreg_t,
  anderson_darling,
  fixed_effects_f,
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Method method = Method::wilcoxon_signed_rank_exact;
  int n = 0;
  int df = 0;
  bool exact = false;
};

/// Signed-rank test on paired differences. Exact (full enumeration over
/// sign assignments, tie-safe via doubled midranks) for n <= 25, normal
/// approximation with tie correction above. Zero differences are dropped.
TestResult wilcoxon_signed_rank(const std::vector<double>& diffs,
                                Tail tail = Tail::two_sided);

/// Rank-sum (Mann-Whitney) test; exact when min(n) <= 12.
TestResult wilcoxon_rank_sum(const std::vector<double>& a,
                             const std::vector<double>& b,
                             Tail tail = Tail::two_sided);

/// Kruskal-Wallis H with tie correction; chi-square approximation.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Friedman chi-square over a blocks x treatments matrix.
TestResult friedman(const std::vector<std::vector<double>>& blocks);

struct LinregResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double p_value = 1.0;
  int n = 0;
};

LinregResult simple_linreg(const std::vector<double>& x,
                           const std::vector<double>& y);

/// Anderson-Darling normality test (mean/variance estimated from data).
TestResult anderson_darling(const std::vector<double>& x);

/// Fixed-effects path used when scores pass the normality gate: timepoint
/// effect after within-participant centering, group effect on participant
/// means. values(participant, timepoint).
struct FixedEffectsResult {
  TestResult timepoint;
  TestResult group;
};
FixedEffectsResult fixed_effects_change(
    const std::vector<std::vector<double>>& values,
    const std::vector<int>& group_of_participant);

// ---------------------------------------------------------------------------
// Covariate-adaptive randomization

struct MinimizationConfig {
  double biased_coin_p = 0.8;
  // tertile cutoffs for the two covariates
  std::array<double, 2> bbt_cuts{15.0, 35.0};
  std::array<double, 2> age_cuts{50.0, 65.0};
};

class Minimization {
 public:
  explicit Minimization(MinimizationConfig cfg = {}) : cfg_(cfg) {}

  /// Pocock-Simon assignment on (BBT tertile, age tertile) marginals.
  patient::Group assign(const patient::PatientProfile& profile,
                        core::SeededRng& rng);

  int count(patient::Group g, int covariate, int level) const;

 private:
  MinimizationConfig cfg_;
  // counts[group][covariate][tertile]
  std::array<std::array<std::array<int, 3>, 2>, 3> counts_{};
};

// ---------------------------------------------------------------------------
// Virtual trial

struct TimepointRow {
  std::optional<double> bbt;
  std::optional<double> crisscross;
  std::optional<double> move_match;
  std::optional<double> thumbsense_missed;
  std::optional<double> hand_capacity;
};

struct ParticipantRecord {
  patient::PatientProfile profile;
  TimepointRow baseline1, baseline2, post, follow_up;
  std::map<int, TimepointRow> weekly;  // by session index
  int total_movements = 0;
  std::vector<double> assisted_success;    // per session
  std::vector<double> unassisted_success;  // probe sessions
  int delta_bbt = 0;  // 1MFU minus mean baseline
};

struct TrialLedger {
  std::uint64_t seed = 0;
  std::vector<ParticipantRecord> participants;
};

struct ResponderRates {
  std::map<patient::Group, double> overall;
  std::map<std::pair<patient::Group, bool>, double> by_impairment;
  std::map<patient::Group, int> n_overall;
  std::map<std::pair<patient::Group, bool>, int> n_by_impairment;
};

ResponderRates responder_report(const TrialLedger& ledger);

struct TrialConfig {
  patient::OutcomeModelParams outcome = patient::OutcomeModelParams::paper_calibrated();
  MinimizationConfig minimization;
  assess::ImpairmentThreshold threshold;
  bool simulate_gameplay = true;
  int jobs = 1;
};

/// Full virtual trial: two baselines, minimization randomization, nine
/// training sessions with the weekly assessment schedule, post and one-month
/// follow-up, then change scores and the test battery.
TrialLedger run_virtual_trial(std::vector<patient::PatientProfile> cohort,
                              const TrialConfig& cfg, std::uint64_t seed);

struct TrialReport {
  std::string table1_csv;
  std::string table2_csv;
  std::string fig4_csv;
  std::string summary_md;
};

TrialReport make_report(const TrialLedger& ledger);

}  // namespace finger::stats
