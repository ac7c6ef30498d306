#include <algorithm>
#include <stdexcept>

#include "finger/stats.hpp"

namespace finger::stats {

namespace {
int tertile(double v, const std::array<double, 2>& cuts) {
  if (v < cuts[0]) return 0;
  if (v < cuts[1]) return 1;
  return 2;
}

int group_index(patient::Group g) {
  switch (g) {
    case patient::Group::standard: return 0;
    case patient::Group::virtual_training: return 1;
    case patient::Group::propriopixel: return 2;
    default: throw std::logic_error("group_index: unassigned");
  }
}

patient::Group group_of(int i) {
  static const patient::Group groups[3] = {patient::Group::standard,
                                           patient::Group::virtual_training,
                                           patient::Group::propriopixel};
  return groups[i];
}
}  // namespace

int Minimization::count(patient::Group g, int covariate, int level) const {
  return counts_[group_index(g)][covariate][level];
}

patient::Group Minimization::assign(const patient::PatientProfile& profile,
                                    core::SeededRng& rng) {
  const int levels[2] = {tertile(profile.baseline_bbt, cfg_.bbt_cuts),
                         tertile(profile.age, cfg_.age_cuts)};

  // Pocock-Simon: for each candidate arm, the imbalance after a hypothetical
  // assignment is the summed range of the relevant marginal counts
  double imbalance[3];
  for (int g = 0; g < 3; ++g) {
    double score = 0.0;
    for (int cov = 0; cov < 2; ++cov) {
      int c[3];
      for (int gg = 0; gg < 3; ++gg) c[gg] = counts_[gg][cov][levels[cov]];
      c[g] += 1;
      score += *std::max_element(c, c + 3) - *std::min_element(c, c + 3);
    }
    imbalance[g] = score;
  }

  const double best = *std::min_element(imbalance, imbalance + 3);
  std::vector<int> minimizers, rest;
  for (int g = 0; g < 3; ++g)
    (imbalance[g] == best ? minimizers : rest).push_back(g);

  int chosen;
  if (rest.empty()) {
    chosen = minimizers[rng.uniform_int(0, static_cast<int>(minimizers.size()) - 1)];
  } else if (rng.uniform() < cfg_.biased_coin_p) {
    chosen = minimizers[rng.uniform_int(0, static_cast<int>(minimizers.size()) - 1)];
  } else {
    chosen = rest[rng.uniform_int(0, static_cast<int>(rest.size()) - 1)];
  }
  for (int cov = 0; cov < 2; ++cov) counts_[chosen][cov][levels[cov]] += 1;
  return group_of(chosen);
}

}  // namespace finger::stats
