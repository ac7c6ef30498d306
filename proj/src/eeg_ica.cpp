#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "finger/eeg.hpp"

namespace finger::eeg {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson: size mismatch");
  const double ma = a.mean(), mb = b.mean();
  const Eigen::VectorXd da = a.array() - ma;
  const Eigen::VectorXd db = b.array() - mb;
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return da.dot(db) / denom;
}

IcaResult fastica(const Eigen::MatrixXd& x, int n_components,
                  core::SeededRng& rng, int max_iter, double tol) {
  const Eigen::Index nch = x.rows();
  const Eigen::Index ns = x.cols();
  if (n_components < 1 || n_components > nch)
    throw std::invalid_argument("fastica: bad component count");

  IcaResult res;
  res.means = x.rowwise().mean();
  Eigen::MatrixXd xc = x.colwise() - res.means;

  // whitening
  const Eigen::MatrixXd cov = xc * xc.transpose() / static_cast<double>(ns - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // eigenvalues ascending; take the top n_components
  Eigen::VectorXd d(n_components);
  Eigen::MatrixXd e(nch, n_components);
  for (int i = 0; i < n_components; ++i) {
    d(i) = std::max(es.eigenvalues()(nch - 1 - i), 1e-12);
    e.col(i) = es.eigenvectors().col(nch - 1 - i);
  }
  const Eigen::MatrixXd whiten = d.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  const Eigen::MatrixXd dewhiten = e * d.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd z = whiten * xc;

  // deflation with tanh contrast
  Eigen::MatrixXd w_all = Eigen::MatrixXd::Zero(n_components, n_components);
  res.converged = true;
  for (int c = 0; c < n_components; ++c) {
    Eigen::VectorXd w(n_components);
    for (int i = 0; i < n_components; ++i) w(i) = rng.normal();
    for (int p = 0; p < c; ++p) w -= w.dot(w_all.row(p)) * w_all.row(p).transpose();
    w.normalize();

    bool ok = false;
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::VectorXd proj = z.transpose() * w;             // ns
      const Eigen::VectorXd g = proj.array().tanh();
      const double gprime_mean = (1.0 - g.array().square()).mean();
      Eigen::VectorXd w_new = (z * g) / static_cast<double>(ns) - gprime_mean * w;
      for (int p = 0; p < c; ++p)
        w_new -= w_new.dot(w_all.row(p)) * w_all.row(p).transpose();
      const double norm = w_new.norm();
      if (norm < 1e-12) break;
      w_new /= norm;
      const double delta = std::abs(std::abs(w_new.dot(w)) - 1.0);
      w = w_new;
      if (delta < tol) {
        ok = true;
        break;
      }
    }
    if (!ok) res.converged = false;
    res.component_converged.push_back(ok);
    w_all.row(c) = w.transpose();
  }

  res.unmixing = w_all * whiten;
  res.mixing = dewhiten * w_all.transpose();
  res.sources = w_all * z;
  return res;
}

Eigen::VectorXd blink_reference(const EegRecording& rec) {
  std::vector<int> frontal;
  for (const char* lbl : {"Fp1", "Fp2"}) {
    const int idx = rec.channel_index(lbl);
    if (idx >= 0) frontal.push_back(idx);
  }
  if (frontal.empty())
    for (const char* lbl : {"F3", "Fz", "F4"}) {
      const int idx = rec.channel_index(lbl);
      if (idx >= 0) frontal.push_back(idx);
    }
  if (frontal.empty())
    throw std::invalid_argument("blink_reference: no frontal channels");

  Eigen::VectorXd ref = Eigen::VectorXd::Zero(rec.data.cols());
  for (int idx : frontal) ref += rec.data.row(idx).transpose();
  ref /= static_cast<double>(frontal.size());
  ref = filtfilt(butterworth_lowpass(4, 8.0, rec.fs), ref);

  // gate to blink-scale transients so background noise never drives removal
  Eigen::VectorXd sorted = ref;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const double med = sorted(sorted.size() / 2);
  Eigen::VectorXd dev = (ref.array() - med).abs();
  Eigen::VectorXd devs = dev;
  std::sort(devs.data(), devs.data() + devs.size());
  const double mad = devs(devs.size() / 2);
  const double gate = med == 0.0 && mad == 0.0 ? 0.0 : 6.0 * 1.4826 * mad;
  for (Eigen::Index i = 0; i < ref.size(); ++i)
    if (std::abs(ref(i) - med) <= gate) ref(i) = 0.0;
    else ref(i) -= med;
  return ref;
}

std::pair<EegRecording, EyeRemovalReport> remove_eye_artifacts(
    const EegRecording& rec, core::SeededRng& rng) {
  EyeRemovalReport report;
  if (rec.data.rows() < 19)
    throw std::invalid_argument("remove_eye_artifacts: need >= 19 channels");
  if (rec.data.cols() < 60.0 * rec.fs)
    throw std::invalid_argument("remove_eye_artifacts: need >= 60 s of data");

  const Eigen::VectorXd ref = blink_reference(rec);
  if (ref.cwiseAbs().maxCoeff() == 0.0) return {rec, report};  // nothing blink-like

  // looser tolerance than the default: the blink component converges in a
  // handful of iterations; the Gaussian noise subspace never does and is
  // allowed to exhaust the iteration budget without blocking removal
  IcaResult ica = fastica(rec.data, 19, rng, 100, 1e-5);

  Eigen::MatrixXd sources = ica.sources;
  bool unconverged_candidate = false;
  for (int c = 0; c < sources.rows(); ++c) {
    const double r = pearson(sources.row(c).transpose(), ref);
    if (std::isfinite(r) && std::abs(r) > 0.7) {
      if (!ica.component_converged[c]) {
        unconverged_candidate = true;
        continue;
      }
      report.removed_components.push_back(c);
      sources.row(c).setZero();
    }
  }
  if (unconverged_candidate && report.removed_components.empty()) {
    report.ica_converged = false;
    return {rec, report};  // pass through with warning
  }
  EegRecording out = rec;
  out.data = ica.mixing * sources;
  out.data.colwise() += ica.means;
  return {out, report};
}

}  // namespace finger::eeg
