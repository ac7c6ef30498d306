#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finger/eeg.hpp"
#include "json.hpp"

namespace finger::eeg {

namespace {
double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (hi + v[mid - 1]);
}
}  // namespace

EpochSet extract_epochs(const EegRecording& rec) {
  EpochSet es;
  es.labels = rec.labels;
  es.fs = rec.fs;
  es.pre_samples = static_cast<int>(std::lround(kEpochPreSeconds * rec.fs));
  const int post = static_cast<int>(std::lround(kEpochPostSeconds * rec.fs));
  const int len = es.pre_samples + post + 1;
  const int b0 = static_cast<int>(std::lround((kBaselineStartSeconds + kEpochPreSeconds) * rec.fs));
  const int b1 = static_cast<int>(std::lround((kBaselineEndSeconds + kEpochPreSeconds) * rec.fs));

  for (const Event& ev : rec.events) {
    if (ev.kind != EventKind::movement_onset) continue;
    const std::int64_t start = ev.sample - es.pre_samples;
    if (start < 0 || start + len > rec.data.cols()) continue;
    Eigen::MatrixXd ep = rec.data.middleCols(start, len);
    // baseline correction over [-250, -50] ms
    const Eigen::VectorXd base =
        ep.middleCols(b0, b1 - b0 + 1).rowwise().mean();
    ep.colwise() -= base;
    es.epochs.push_back(std::move(ep));
  }
  return es;
}

RejectionReport epoch_reject(const EpochSet& es, const RejectionConfig& cfg) {
  const int nch = es.n_channels();
  const int nep = es.n_epochs();
  if (nep < 4) throw std::invalid_argument("epoch_reject: need >= 4 epochs");

  RejectionReport rep;
  rep.kept.resize(nch, nep);
  rep.kept.setConstant(true);

  // stage 1: absolute amplitude and sample-to-sample step thresholds
  for (int ep = 0; ep < nep; ++ep) {
    const Eigen::MatrixXd& m = es.epochs[ep];
    for (int ch = 0; ch < nch; ++ch) {
      const auto row = m.row(ch);
      if (row.cwiseAbs().maxCoeff() > cfg.abs_threshold_uv) {
        rep.kept(ch, ep) = false;
        continue;
      }
      for (Eigen::Index k = 1; k < row.cols(); ++k) {
        if (std::abs(row(k) - row(k - 1)) > cfg.step_threshold_uv) {
          rep.kept(ch, ep) = false;
          break;
        }
      }
    }
  }

  // stage 2: per-channel MAD rule on epoch median and variance
  constexpr double kMadGuard = 1e-12;
  for (int ch = 0; ch < nch; ++ch) {
    std::vector<double> meds(nep), vars(nep);
    for (int ep = 0; ep < nep; ++ep) {
      const auto row = es.epochs[ep].row(ch);
      std::vector<double> vals(row.data(), row.data() + row.cols());
      meds[ep] = median_of(vals);
      const double mean = row.mean();
      vars[ep] = (row.array() - mean).square().sum() / (row.cols() - 1.0);
    }
    const double med_m = median_of(meds);
    const double med_v = median_of(vars);
    std::vector<double> dev_m(nep), dev_v(nep);
    for (int ep = 0; ep < nep; ++ep) {
      dev_m[ep] = std::abs(meds[ep] - med_m);
      dev_v[ep] = std::abs(vars[ep] - med_v);
    }
    // normal-consistent scaling: 3 x 1.4826 x MAD ~ 3 sigma for Gaussian
    // spread, keeping the false-rejection floor near the 5% operating point
    constexpr double kMadScale = 1.4826;
    const double mad_m = kMadScale * std::max(median_of(dev_m), kMadGuard);
    const double mad_v = kMadScale * std::max(median_of(dev_v), kMadGuard);
    for (int ep = 0; ep < nep; ++ep) {
      // offset artifacts cut both ways; only excess variance is artifactual
      if (dev_m[ep] > cfg.mad_multiplier * mad_m ||
          vars[ep] - med_v > cfg.mad_multiplier * mad_v)
        rep.kept(ch, ep) = false;
    }
  }

  rep.channel_excluded.assign(nch, false);
  std::int64_t rejected = 0;
  for (int ch = 0; ch < nch; ++ch) {
    int removed = 0;
    for (int ep = 0; ep < nep; ++ep)
      if (!rep.kept(ch, ep)) ++removed;
    rejected += removed;
    if (removed > cfg.channel_exclusion_fraction * nep)
      rep.channel_excluded[ch] = true;
  }
  rep.overall_rejection_fraction =
      static_cast<double>(rejected) / (static_cast<double>(nch) * nep);
  return rep;
}

PcnvResult pcnv(const EpochSet& es, const RejectionReport& rej,
                const std::vector<std::string>& electrodes) {
  PcnvResult res;
  const int w0 = es.pre_samples + static_cast<int>(std::lround(kPcnvWindowStart * es.fs));
  const int w1 = es.pre_samples + static_cast<int>(std::lround(kPcnvWindowEnd * es.fs));
  for (const std::string& lbl : electrodes) {
    int ch = -1;
    for (std::size_t i = 0; i < es.labels.size(); ++i)
      if (es.labels[i] == lbl) ch = static_cast<int>(i);
    if (ch < 0) {
      res.amplitude_uv[lbl] = std::nullopt;
      continue;
    }
    int kept = 0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(w1 - w0 + 1);
    for (int ep = 0; ep < es.n_epochs(); ++ep) {
      if (!rej.kept(ch, ep) || rej.channel_excluded[ch]) continue;
      acc += es.epochs[ep].row(ch).segment(w0, w1 - w0 + 1).transpose();
      ++kept;
    }
    res.kept_epochs[lbl] = kept;
    res.rejected_epochs[lbl] = es.n_epochs() - kept;
    if (kept < kPcnvMinEpochs) {
      res.amplitude_uv[lbl] = std::nullopt;
    } else {
      res.amplitude_uv[lbl] = acc.mean() / kept;
    }
  }
  return res;
}

std::string PcnvResult::to_csv() const {
  std::ostringstream os;
  os << "electrode,amplitude_uv,kept_epochs,rejected_epochs\n";
  for (const auto& [lbl, amp] : amplitude_uv) {
    os << lbl << ",";
    if (amp)
      os << *amp;
    else
      os << "NA";
    os << "," << (kept_epochs.count(lbl) ? kept_epochs.at(lbl) : 0) << ","
       << (rejected_epochs.count(lbl) ? rejected_epochs.at(lbl) : 0) << "\n";
  }
  return os.str();
}

EegRecording mirror_electrodes(const EegRecording& rec, AffectedSide side) {
  if (side == AffectedSide::right) return rec;  // reference configuration
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"Fp1", "Fp2"}, {"F7", "F8"}, {"F3", "F4"}, {"T3", "T4"},
      {"C3", "C4"},   {"T5", "T6"}, {"P3", "P4"}, {"O1", "O2"}};
  EegRecording out = rec;
  for (const auto& [l, r] : pairs) {
    const int li = rec.channel_index(l);
    const int ri = rec.channel_index(r);
    if (li < 0 || ri < 0) {
      if ((l == "F3" || l == "C3" || l == "P3"))
        throw std::invalid_argument("mirror_electrodes: missing lateral pair " + l);
      continue;
    }
    out.data.row(li) = rec.data.row(ri);
    out.data.row(ri) = rec.data.row(li);
  }
  return out;
}

CorrelationMap kinematic_correlation_map(const EegRecording& rec,
                                         const SynthOutput& task) {
  const Eigen::Index n = rec.data.cols();
  const int kNreg = 5;
  Eigen::MatrixXd reg = Eigen::MatrixXd::Zero(kNreg, n);
  // rest posture between trials: finger 1 extended, finger 2 flexed
  reg.row(0).setConstant(12.0);
  reg.row(1).setConstant(54.0);
  reg.row(2) = reg.row(1) - reg.row(0);
  reg.row(4) = reg.row(2).cwiseAbs();

  std::size_t trial = 0;
  for (const Event& ev : rec.events) {
    if (ev.kind != EventKind::movement_onset) continue;
    if (trial >= task.kinematics.size()) break;
    const auto& [rising, falling] = task.kinematics[trial];
    const double dur = rising.t_end();
    const double speed = task.speeds[trial];
    for (Eigen::Index k = ev.sample; k < n; ++k) {
      const double t = (k - ev.sample) / rec.fs;
      if (t > dur) break;
      const double a1 = rising.angle_at(t);
      const double a2 = falling.angle_at(t);
      reg(0, k) = a1;
      reg(1, k) = a2;
      reg(2, k) = a2 - a1;
      reg(3, k) = 2.0 * speed;  // relative closing velocity
      reg(4, k) = std::abs(a2 - a1);
    }
    ++trial;
  }

  CorrelationMap map;
  map.channels = rec.labels;
  map.regressors = {"theta1", "theta2", "separation", "relative_velocity", "error"};
  map.r.resize(rec.data.rows(), kNreg);
  for (Eigen::Index ch = 0; ch < rec.data.rows(); ++ch)
    for (int j = 0; j < kNreg; ++j)
      map.r(ch, j) = pearson(rec.data.row(ch).transpose(), reg.row(j).transpose());
  return map;
}

std::string CorrelationMap::to_csv() const {
  std::ostringstream os;
  os << "channel";
  for (const auto& rg : regressors) os << "," << rg;
  os << "\n";
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    os << channels[ch];
    for (std::size_t j = 0; j < regressors.size(); ++j) {
      os << ",";
      const double v = r(ch, j);
      if (std::isfinite(v))
        os << v;
      else
        os << "NA";
    }
    os << "\n";
  }
  return os.str();
}

void save_recording(const EegRecording& rec, const std::string& data_path,
                    const std::string& sidecar_path) {
  std::ofstream df(data_path);
  if (!df) throw std::runtime_error("save_recording: cannot open " + data_path);
  df.precision(10);
  for (std::size_t i = 0; i < rec.labels.size(); ++i)
    df << (i ? "," : "") << rec.labels[i];
  df << "\n";
  for (Eigen::Index s = 0; s < rec.data.cols(); ++s) {
    for (Eigen::Index ch = 0; ch < rec.data.rows(); ++ch)
      df << (ch ? "," : "") << rec.data(ch, s);
    df << "\n";
  }

  nlohmann::json side;
  side["labels"] = rec.labels;
  side["fs"] = rec.fs;
  nlohmann::json evs = nlohmann::json::array();
  for (const Event& e : rec.events) {
    const char* kind = e.kind == EventKind::movement_onset ? "movement_onset"
                       : e.kind == EventKind::button_press ? "button_press"
                                                           : "feedback_on";
    evs.push_back({{"sample", e.sample}, {"kind", kind}});
  }
  side["events"] = evs;
  std::ofstream sf(sidecar_path);
  if (!sf) throw std::runtime_error("save_recording: cannot open " + sidecar_path);
  sf << side.dump(2) << "\n";
}

EegRecording load_recording(const std::string& data_path,
                            const std::string& sidecar_path) {
  std::ifstream sf(sidecar_path);
  if (!sf) throw std::runtime_error("load_recording: cannot open " + sidecar_path);
  nlohmann::json side;
  try {
    sf >> side;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_recording: malformed sidecar " + sidecar_path +
                             ": " + e.what());
  }
  EegRecording rec;
  rec.labels = side.at("labels").get<std::vector<std::string>>();
  rec.fs = side.at("fs").get<double>();
  for (const auto& ej : side.at("events")) {
    Event e;
    e.sample = ej.at("sample").get<std::int64_t>();
    const std::string kind = ej.at("kind").get<std::string>();
    if (kind == "movement_onset")
      e.kind = EventKind::movement_onset;
    else if (kind == "button_press")
      e.kind = EventKind::button_press;
    else if (kind == "feedback_on")
      e.kind = EventKind::feedback_on;
    else
      throw std::runtime_error("load_recording: unknown event kind '" + kind +
                               "' in " + sidecar_path);
    rec.events.push_back(e);
  }

  std::ifstream df(data_path);
  if (!df) throw std::runtime_error("load_recording: cannot open " + data_path);
  std::string line;
  std::getline(df, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(df, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != rec.labels.size())
      throw std::runtime_error("load_recording: column count mismatch at line " +
                               std::to_string(rows.size() + 2));
    rows.push_back(std::move(row));
  }
  rec.data.resize(rec.labels.size(), rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t ch = 0; ch < rec.labels.size(); ++ch)
      rec.data(ch, s) = rows[s][ch];
  return rec;
}

}  // namespace finger::eeg
