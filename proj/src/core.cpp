#include "finger/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace finger::core {

Workspace training_workspace(const Workspace& active, const Workspace& passive) {
  if (!active.valid() || !passive.valid())
    throw std::invalid_argument("training_workspace: invalid range");
  const double pmid = passive.mid();
  const double cap_lo = pmid - 0.45 * passive.span();
  const double cap_hi = pmid + 0.45 * passive.span();
  Workspace ws{std::max(active.min_deg, cap_lo), std::min(active.max_deg, cap_hi)};
  if (!ws.valid()) throw std::invalid_argument("training_workspace: empty overlap");
  return ws;
}

double Trajectory::angle_at(double t) const {
  if (empty() || t < t_begin() - 1e-12 || t > t_end() + 1e-12)
    throw std::invalid_argument("Trajectory::angle_at: t outside span");
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TrajectorySample& s, double tt) { return s.t < tt; });
  if (it == samples.begin()) return it->angle;
  if (it == samples.end()) return samples.back().angle;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return a.angle + u * (b.angle - a.angle);
}

double Trajectory::velocity_at(double t) const {
  if (empty() || t < t_begin() - 1e-12 || t > t_end() + 1e-12)
    throw std::invalid_argument("Trajectory::velocity_at: t outside span");
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TrajectorySample& s, double tt) { return s.t < tt; });
  if (it == samples.begin()) return it->velocity;
  if (it == samples.end()) return samples.back().velocity;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return a.velocity + u * (b.velocity - a.velocity);
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os << "t,angle_deg,velocity_degps\n";
  os.precision(12);
  for (const auto& s : samples) os << s.t << "," << s.angle << "," << s.velocity << "\n";
  return os.str();
}

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // PCG-XSH-RR 64/32 style state setup via splitmix of (seed, stream).
  std::uint64_t s = seed ^ (0x853c49e6748fea9bULL + stream * 0xda3e39cb94b95bdbULL);
  state_ = splitmix64(s);
  inc_ = splitmix64(s) | 1ULL;
  next_u64();
}

std::uint64_t SeededRng::next_u64() {
  // xorshift128+-like step on (state_, inc_-derived) kept minimal; inc_ is
  // the odd stream increment of an LCG.
  state_ = state_ * 6364136223846793005ULL + inc_;
  std::uint64_t x = state_;
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::int64_t SeededRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double SeededRng::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * M_PI * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return mean + sd * r * std::cos(th);
}

SeededRng SeededRng::fork(std::uint64_t substream) const {
  std::uint64_t mix = stream_ * 0x9e3779b97f4a7c15ULL + substream + 1;
  return SeededRng(seed_, mix);
}

Trajectory minimum_jerk_trajectory(double start, double end, double t0,
                                   double t1, double dt) {
  if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(t0) ||
      !std::isfinite(t1) || !std::isfinite(dt))
    throw std::invalid_argument("minimum_jerk_trajectory: non-finite input");
  if (t1 <= t0 || dt <= 0.0)
    throw std::invalid_argument("minimum_jerk_trajectory: bad time span");

  const double span = t1 - t0;
  const double amp = end - start;
  Trajectory traj;
  const auto n = static_cast<std::size_t>(std::floor(span / dt + 1e-9));
  traj.samples.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const double tau = (t - t0) / span;
    const double pos = 10.0 * tau * tau * tau - 15.0 * tau * tau * tau * tau +
                       6.0 * tau * tau * tau * tau * tau;
    const double vel = (30.0 * tau * tau - 60.0 * tau * tau * tau +
                        30.0 * tau * tau * tau * tau) / span;
    traj.samples.push_back({t, start + amp * pos, amp * vel});
  }
  if (traj.samples.back().t < t1 - 1e-12)
    traj.samples.push_back({t1, end, 0.0});
  return traj;
}

double clamp_to_workspace(double angle, const Workspace& ws) {
  if (!ws.valid()) throw std::invalid_argument("clamp_to_workspace: invalid workspace");
  return std::clamp(angle, ws.min_deg, ws.max_deg);
}

std::tuple<Trajectory, Trajectory, double> crossing_pattern(double ws_low,
                                                            double ws_high,
                                                            double speed,
                                                            double dt) {
  if (speed <= 0.0) throw std::invalid_argument("crossing_pattern: speed must be positive");
  if (ws_low >= ws_high) throw std::invalid_argument("crossing_pattern: empty workspace");
  if (dt <= 0.0) throw std::invalid_argument("crossing_pattern: bad dt");

  const double span = ws_high - ws_low;
  const double duration = span / speed;
  Trajectory rising, falling;
  const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  rising.samples.reserve(n + 2);
  falling.samples.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    rising.samples.push_back({t, ws_low + speed * t, speed});
    falling.samples.push_back({t, ws_high - speed * t, -speed});
  }
  if (rising.samples.back().t < duration - 1e-12) {
    rising.samples.push_back({duration, ws_high, speed});
    falling.samples.push_back({duration, ws_low, -speed});
  }
  const double t_cross = 0.5 * span / speed;
  return {std::move(rising), std::move(falling), t_cross};
}

}  // namespace finger::core
