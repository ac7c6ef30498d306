#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "finger/stats.hpp"

namespace finger::stats {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m] + v[m - 1]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - lo;
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

games::GameMode game_mode_for(patient::Group g) {
  switch (g) {
    case patient::Group::propriopixel: return games::GameMode::propriopixel;
    case patient::Group::virtual_training: return games::GameMode::virtual_amp;
    default: return games::GameMode::standard;
  }
}

// simple force-workspace model: boundary spanned by per-finger maximal
// forces, shrinking with impairment
double simulated_hand_capacity(const patient::PatientProfile& p,
                               core::SeededRng& rng) {
  const double base = 2.0 + 0.06 * p.baseline_bbt;
  const double fi = std::max(0.5, base + rng.normal(0.0, 0.4));
  const double fm = std::max(0.5, base + rng.normal(0.0, 0.4));
  const std::vector<std::pair<double, double>> boundary = {
      {0.0, 0.0}, {fi, 0.0}, {0.85 * fi, 0.85 * fm}, {0.0, fm}};
  return assess::hand_capacity(boundary, 16.0);
}

TimepointRow measure_timepoint(const patient::PatientProfile& p,
                               double bbt_value, core::SeededRng& rng) {
  TimepointRow row;
  row.bbt = std::max(0.0, std::round(bbt_value + rng.normal(0.0, 1.5)));
  auto cc_rng = rng.fork(1);
  row.crisscross = assess::run_crisscross(p, cc_rng).mean_abs_error;
  auto mm_rng = rng.fork(2);
  row.move_match = assess::run_move_match(p, mm_rng);
  auto ts_rng = rng.fork(3);
  row.thumbsense_missed = assess::run_thumbsense(p, ts_rng).percent_missed;
  auto hc_rng = rng.fork(4);
  row.hand_capacity = simulated_hand_capacity(p, hc_rng);
  return row;
}

// proprioceptive-focused training sharpens perception at post/follow-up
patient::PatientProfile improved_profile(const patient::PatientProfile& p) {
  patient::PatientProfile out = p;
  double factor = 1.0;
  if (p.group == patient::Group::virtual_training) factor = 0.90;
  if (p.group == patient::Group::propriopixel) factor = 0.85;
  out.prop_noise_sd *= factor;
  out.latency_mean *= factor;
  return out;
}

void simulate_participant(ParticipantRecord& rec, const TrialConfig& cfg,
                          std::uint64_t seed, int index) {
  core::SeededRng root(seed, 7000 + static_cast<std::uint64_t>(index));
  patient::PatientProfile& p = rec.profile;

  const double mean_baseline =
      0.5 * (*rec.baseline1.bbt + *rec.baseline2.bbt);
  auto outcome_rng = root.fork(1);
  rec.delta_bbt = patient::sample_outcome(p, cfg.outcome, outcome_rng);

  assist::AssistState assist_state;
  assist_state.mode = p.group == patient::Group::virtual_training
                          ? assist::Mode::virtual_amp
                          : assist::Mode::physical;
  assist::DifficultyState difficulty;
  const games::GameMode mode = game_mode_for(p.group);
  const games::SessionPlan plan;

  for (int session = 1; session <= 9; ++session) {
    auto srng = root.fork(100 + session);
    if (cfg.simulate_gameplay) {
      auto session_rec = games::run_session(plan, mode, p, assist_state,
                                            difficulty, session, srng);
      rec.total_movements += session_rec.movements;
      rec.assisted_success.push_back(session_rec.assisted_success);
      if (session_rec.unassisted_success)
        rec.unassisted_success.push_back(*session_rec.unassisted_success);
      assist_state = session_rec.assist;
      difficulty = session_rec.difficulty;
    }
    TimepointRow row;
    auto arng = root.fork(200 + session);
    const auto due = assess::assessment_schedule(session);
    if (due.count(assess::Assessment::bbt)) {
      const double trend = mean_baseline + rec.delta_bbt * session / 9.0;
      row.bbt = std::max(0.0, std::round(trend + arng.normal(0.0, 1.5)));
    }
    if (due.count(assess::Assessment::crisscross)) {
      auto r = arng.fork(1);
      row.crisscross = assess::run_crisscross(p, r).mean_abs_error;
    }
    if (due.count(assess::Assessment::move_match)) {
      auto r = arng.fork(2);
      row.move_match = assess::run_move_match(p, r);
    }
    if (due.count(assess::Assessment::thumbsense)) {
      auto r = arng.fork(3);
      row.thumbsense_missed = assess::run_thumbsense(p, r).percent_missed;
    }
    rec.weekly[session] = row;
  }

  const patient::PatientProfile trained = improved_profile(p);
  auto post_rng = root.fork(300);
  rec.post = measure_timepoint(trained, mean_baseline + 0.9 * rec.delta_bbt, post_rng);
  auto fu_rng = root.fork(301);
  rec.follow_up = measure_timepoint(trained, mean_baseline + rec.delta_bbt, fu_rng);
  // change scores are taken from the average baseline; pin the follow-up BBT
  // so the ledger's change equals the drawn outcome
  rec.follow_up.bbt = mean_baseline + rec.delta_bbt;
}

}  // namespace

TrialLedger run_virtual_trial(std::vector<patient::PatientProfile> cohort,
                              const TrialConfig& cfg, std::uint64_t seed) {
  if (cohort.size() < 6)
    throw std::invalid_argument("run_virtual_trial: cohort too small");

  TrialLedger ledger;
  ledger.seed = seed;
  ledger.participants.resize(cohort.size());

  // two baseline visits, then impairment classification
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    ParticipantRecord& rec = ledger.participants[i];
    rec.profile = cohort[i];
    core::SeededRng root(seed, 5000 + i);
    auto b1 = root.fork(1);
    auto b2 = root.fork(2);
    rec.baseline1 = measure_timepoint(rec.profile, rec.profile.baseline_bbt, b1);
    rec.baseline2 = measure_timepoint(rec.profile, rec.profile.baseline_bbt, b2);
    const double cc = 0.5 * (*rec.baseline1.crisscross + *rec.baseline2.crisscross);
    rec.profile.impaired = assess::classify_impairment(cc, cfg.threshold);
  }

  // covariate-adaptive randomization at the second baseline visit
  Minimization minim(cfg.minimization);
  core::SeededRng rand_rng(seed, 42);
  for (auto& rec : ledger.participants)
    rec.profile.group = minim.assign(rec.profile, rand_rng);

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < ledger.participants.size(); ++i)
      simulate_participant(ledger.participants[i], cfg, seed, static_cast<int>(i));
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < ledger.participants.size();
             i = next.fetch_add(1))
          simulate_participant(ledger.participants[i], cfg, seed,
                               static_cast<int>(i));
      });
    }
    for (auto& t : pool) t.join();
  }
  return ledger;
}

ResponderRates responder_report(const TrialLedger& ledger) {
  ResponderRates rates;
  std::map<patient::Group, int> resp, n;
  std::map<std::pair<patient::Group, bool>, int> resp_i, n_i;
  for (const auto& rec : ledger.participants) {
    const patient::Group g = rec.profile.group;
    const bool responder = rec.delta_bbt >= 6;
    ++n[g];
    ++n_i[{g, rec.profile.impaired}];
    if (responder) {
      ++resp[g];
      ++resp_i[{g, rec.profile.impaired}];
    }
  }
  for (const auto& [g, cnt] : n) {
    rates.overall[g] = 100.0 * resp[g] / cnt;
    rates.n_overall[g] = cnt;
  }
  for (const auto& [key, cnt] : n_i) {
    rates.by_impairment[key] = 100.0 * resp_i[key] / cnt;
    rates.n_by_impairment[key] = cnt;
  }
  return rates;
}

namespace {

struct Measure {
  const char* name;
  const char* units;
  Tail improvement_tail;  // direction of within-group improvement
  std::function<std::optional<double>(const TimepointRow&)> get;
};

const std::vector<Measure>& measures() {
  static const std::vector<Measure> m = {
      {"bbt", "blocks", Tail::greater, [](const TimepointRow& r) { return r.bbt; }},
      {"crisscross", "deg", Tail::less, [](const TimepointRow& r) { return r.crisscross; }},
      {"move_match", "deg", Tail::less, [](const TimepointRow& r) { return r.move_match; }},
      {"thumbsense", "% missed", Tail::less,
       [](const TimepointRow& r) { return r.thumbsense_missed; }},
      {"hand_capacity", "n.u.", Tail::greater,
       [](const TimepointRow& r) { return r.hand_capacity; }},
  };
  return m;
}

std::string med_iqr(std::vector<double> v) {
  std::ostringstream os;
  os.precision(3);
  os << median(v) << " [" << quantile(v, 0.25) << "-" << quantile(v, 0.75) << "]";
  return os.str();
}

const char* method_name(Method m) {
  switch (m) {
    case Method::wilcoxon_signed_rank_exact: return "signed-rank (exact)";
    case Method::wilcoxon_signed_rank_normal: return "signed-rank (normal)";
    case Method::wilcoxon_rank_sum_exact: return "rank-sum (exact)";
    case Method::wilcoxon_rank_sum_normal: return "rank-sum (normal)";
    case Method::kruskal_wallis_chi2: return "kruskal-wallis";
    case Method::friedman_chi2: return "friedman";
    case Method::linreg_t: return "linreg";
    case Method::anderson_darling: return "anderson-darling";
    case Method::fixed_effects_f: return "fixed-effects F";
  }
  return "";
}

}  // namespace

TrialReport make_report(const TrialLedger& ledger) {
  TrialReport rep;
  const std::vector<patient::Group> groups = {patient::Group::standard,
                                              patient::Group::virtual_training,
                                              patient::Group::propriopixel};

  // ---- table1: baseline summary per group
  {
    std::ostringstream os;
    os << "group,n,n_impaired,age,baseline_bbt,crisscross_deg,move_match_deg,"
          "thumbsense_pct_missed,hand_capacity_nu\n";
    for (patient::Group g : groups) {
      std::vector<double> age, bbt, cc, mm, ts, hc;
      int n = 0, imp = 0;
      for (const auto& rec : ledger.participants) {
        if (rec.profile.group != g) continue;
        ++n;
        if (rec.profile.impaired) ++imp;
        age.push_back(rec.profile.age);
        bbt.push_back(0.5 * (*rec.baseline1.bbt + *rec.baseline2.bbt));
        cc.push_back(0.5 * (*rec.baseline1.crisscross + *rec.baseline2.crisscross));
        mm.push_back(0.5 * (*rec.baseline1.move_match + *rec.baseline2.move_match));
        ts.push_back(0.5 * (*rec.baseline1.thumbsense_missed +
                            *rec.baseline2.thumbsense_missed));
        hc.push_back(*rec.baseline1.hand_capacity);
      }
      os << patient::to_string(g) << "," << n << "," << imp << "," << med_iqr(age)
         << "," << med_iqr(bbt) << "," << med_iqr(cc) << "," << med_iqr(mm) << ","
         << med_iqr(ts) << "," << med_iqr(hc) << "\n";
    }
    rep.table1_csv = os.str();
  }

  // ---- table2: change-score test battery (follow-up minus mean baseline)
  {
    std::ostringstream os;
    os << "measure,scope,median_change,statistic,p_value,method,n\n";
    os.precision(5);
    for (const auto& ms : measures()) {
      std::map<patient::Group, std::vector<double>> change;
      std::vector<double> all;
      for (const auto& rec : ledger.participants) {
        const auto fu = ms.get(rec.follow_up);
        const auto b1 = ms.get(rec.baseline1);
        const auto b2 = ms.get(rec.baseline2);
        if (!fu || !b1 || !b2) continue;
        const double d = *fu - 0.5 * (*b1 + *b2);
        change[rec.profile.group].push_back(d);
        all.push_back(d);
      }
      auto emit = [&](const std::string& scope, const std::vector<double>& v,
                      Tail tail) {
        if (v.size() < 2) return;
        try {
          const TestResult t = wilcoxon_signed_rank(v, tail);
          os << ms.name << "," << scope << "," << median(v) << "," << t.statistic
             << "," << t.p_value << "," << method_name(t.method) << "," << t.n
             << "\n";
        } catch (const std::domain_error&) {
          os << ms.name << "," << scope << "," << median(v) << ",NA,NA,undefined,"
             << v.size() << "\n";
        }
      };
      emit("all", all, ms.improvement_tail);
      for (patient::Group g : groups)
        emit(patient::to_string(g), change[g], ms.improvement_tail);
      if (change.size() >= 2) {
        std::vector<std::vector<double>> kw_groups;
        for (patient::Group g : groups)
          if (!change[g].empty()) kw_groups.push_back(change[g]);
        if (kw_groups.size() >= 2) {
          try {
            const TestResult t = kruskal_wallis(kw_groups);
            os << ms.name << ",between_groups," << median(all) << ","
               << t.statistic << "," << t.p_value << "," << method_name(t.method)
               << "," << t.n << "\n";
          } catch (const std::domain_error&) {
            os << ms.name << ",between_groups," << median(all)
               << ",NA,NA,undefined," << all.size() << "\n";
          }
        }
      }
    }
    rep.table2_csv = os.str();
  }

  // ---- fig4: responder rates
  {
    const ResponderRates rates = responder_report(ledger);
    std::ostringstream os;
    os << "group,subset,n,rate_pct\n";
    os.precision(4);
    for (patient::Group g : groups) {
      if (rates.n_overall.count(g))
        os << patient::to_string(g) << ",all," << rates.n_overall.at(g) << ","
           << rates.overall.at(g) << "\n";
      for (bool imp : {true, false}) {
        const auto key = std::make_pair(g, imp);
        if (rates.n_by_impairment.count(key))
          os << patient::to_string(g) << "," << (imp ? "impaired" : "intact")
             << "," << rates.n_by_impairment.at(key) << ","
             << rates.by_impairment.at(key) << "\n";
      }
    }
    rep.fig4_csv = os.str();
  }

  // ---- markdown summary
  {
    std::ostringstream os;
    os << "# Virtual trial report\n\n";
    os << "Seed: " << ledger.seed << "; participants: "
       << ledger.participants.size() << "\n\n";
    os << "## Dose\n\n";
    std::vector<double> moves;
    for (const auto& rec : ledger.participants)
      if (rec.total_movements > 0) moves.push_back(rec.total_movements);
    if (!moves.empty()) {
      const double mean =
          std::accumulate(moves.begin(), moves.end(), 0.0) / moves.size();
      os << "Mean movements over nine sessions: " << static_cast<int>(mean)
         << "\n\n";
    } else {
      os << "Gameplay simulation disabled for this run.\n\n";
    }
    os << "## Responder rates (MCID >= 6 blocks)\n\n";
    const ResponderRates rates = responder_report(ledger);
    os << "| group | subset | n | rate % |\n|---|---|---|---|\n";
    for (patient::Group g : groups)
      for (bool imp : {true, false}) {
        const auto key = std::make_pair(g, imp);
        if (rates.n_by_impairment.count(key)) {
          os << "| " << patient::to_string(g) << " | "
             << (imp ? "impaired" : "intact") << " | "
             << rates.n_by_impairment.at(key) << " | ";
          os.precision(3);
          os << rates.by_impairment.at(key) << " |\n";
        }
      }
    os << "\nSee table1.csv, table2.csv and fig4_rates.csv for the full "
          "battery.\n";
    rep.summary_md = os.str();
  }
  return rep;
}

}  // namespace finger::stats
