#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "finger/stats.hpp"

namespace finger::stats {

namespace {

double normal_sf(double z) {
  return boost::math::cdf(boost::math::complement(boost::math::normal(), z));
}

double chi2_sf(double x, int df) {
  if (x <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

/// Midranks of v; returns ranks and the tie-correction term sum(t^3 - t).
std::pair<std::vector<double>, double> midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(n);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) tie_term += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return {ranks, tie_term};
}

}  // namespace

TestResult wilcoxon_signed_rank(const std::vector<double>& diffs, Tail tail) {
  std::vector<double> abs_d;
  std::vector<int> signs;
  for (double d : diffs) {
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    signs.push_back(d > 0 ? 1 : -1);
  }
  const int n = static_cast<int>(abs_d.size());
  if (n == 0) throw std::domain_error("wilcoxon_signed_rank: all differences are zero");

  auto [ranks, tie_term] = midranks(abs_d);
  double w_plus = 0.0;
  for (int i = 0; i < n; ++i)
    if (signs[i] > 0) w_plus += ranks[i];

  TestResult res;
  res.statistic = w_plus;
  res.n = n;

  if (n <= 25) {
    // exact enumeration over sign assignments; doubled ranks keep midranks
    // integral so the distribution can be tabulated by convolution
    std::vector<long long> r2(n);
    long long total = 0;
    for (int i = 0; i < n; ++i) {
      r2[i] = std::llround(2.0 * ranks[i]);
      total += r2[i];
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (int i = 0; i < n; ++i)
      for (long long s = total; s >= r2[i]; --s) count[s] += count[s - r2[i]];
    const double denom = std::pow(2.0, n);
    const long long w2 = std::llround(2.0 * w_plus);
    double p_ge = 0.0, p_le = 0.0;
    for (long long s = 0; s <= total; ++s) {
      if (s >= w2) p_ge += count[s];
      if (s <= w2) p_le += count[s];
    }
    p_ge /= denom;
    p_le /= denom;
    switch (tail) {
      case Tail::greater: res.p_value = p_ge; break;
      case Tail::less: res.p_value = p_le; break;
      case Tail::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(p_ge, p_le)); break;
    }
    res.method = Method::wilcoxon_signed_rank_exact;
    res.exact = true;
    return res;
  }

  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double sd = std::sqrt(var);
  const double z_ge = (w_plus - mean - 0.5) / sd;
  const double z_le = (w_plus - mean + 0.5) / sd;
  switch (tail) {
    case Tail::greater: res.p_value = normal_sf(z_ge); break;
    case Tail::less: res.p_value = 1.0 - normal_sf(z_le); break;
    case Tail::two_sided:
      res.p_value = std::min(1.0, 2.0 * std::min(normal_sf(z_ge), 1.0 - normal_sf(z_le)));
      break;
  }
  res.method = Method::wilcoxon_signed_rank_normal;
  return res;
}

TestResult wilcoxon_rank_sum(const std::vector<double>& a,
                             const std::vector<double>& b, Tail tail) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
  const int n1 = static_cast<int>(a.size());
  const int n2 = static_cast<int>(b.size());
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  auto [ranks, tie_term] = midranks(pooled);
  double w = 0.0;
  for (int i = 0; i < n1; ++i) w += ranks[i];

  TestResult res;
  res.statistic = w;
  res.n = n1 + n2;

  if (std::min(n1, n2) <= 12 && n1 + n2 <= 40) {
    // exact distribution of the rank sum via subset convolution
    std::vector<long long> r2(n1 + n2);
    long long total = 0;
    for (int i = 0; i < n1 + n2; ++i) {
      r2[i] = std::llround(2.0 * ranks[i]);
      total += r2[i];
    }
    // dp[k][s]: subsets of size k with doubled-rank sum s
    std::vector<std::vector<double>> dp(n1 + 1, std::vector<double>(total + 1, 0.0));
    dp[0][0] = 1.0;
    for (int i = 0; i < n1 + n2; ++i)
      for (int k = std::min(n1 - 1, i); k >= 0; --k)
        for (long long s = total - r2[i]; s >= 0; --s)
          if (dp[k][s] > 0) dp[k + 1][s + r2[i]] += dp[k][s];
    double denom = 0.0, p_ge = 0.0, p_le = 0.0;
    const long long w2 = std::llround(2.0 * w);
    for (long long s = 0; s <= total; ++s) {
      denom += dp[n1][s];
      if (s >= w2) p_ge += dp[n1][s];
      if (s <= w2) p_le += dp[n1][s];
    }
    p_ge /= denom;
    p_le /= denom;
    switch (tail) {
      case Tail::greater: res.p_value = p_ge; break;
      case Tail::less: res.p_value = p_le; break;
      case Tail::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(p_ge, p_le)); break;
    }
    res.method = Method::wilcoxon_rank_sum_exact;
    res.exact = true;
    return res;
  }

  const double n = n1 + n2;
  const double mean = n1 * (n + 1.0) / 2.0;
  const double var = n1 * static_cast<double>(n2) / 12.0 *
                     (n + 1.0 - tie_term / (n * (n - 1.0)));
  const double sd = std::sqrt(var);
  const double z_ge = (w - mean - 0.5) / sd;
  const double z_le = (w - mean + 0.5) / sd;
  switch (tail) {
    case Tail::greater: res.p_value = normal_sf(z_ge); break;
    case Tail::less: res.p_value = 1.0 - normal_sf(z_le); break;
    case Tail::two_sided:
      res.p_value = std::min(1.0, 2.0 * std::min(normal_sf(z_ge), 1.0 - normal_sf(z_le)));
      break;
  }
  res.method = Method::wilcoxon_rank_sum_normal;
  return res;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal_wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double first = pooled.front();
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == first; }))
    throw std::domain_error("kruskal_wallis: all observations identical");

  auto [ranks, tie_term] = midranks(pooled);
  const double n = static_cast<double>(pooled.size());
  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rsum += ranks[offset + i];
    h += rsum * rsum / g.size();
    offset += g.size();
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction > 0) h /= correction;

  TestResult res;
  res.statistic = h;
  res.n = static_cast<int>(n);
  res.df = static_cast<int>(groups.size()) - 1;
  res.p_value = chi2_sf(h, res.df);
  res.method = Method::kruskal_wallis_chi2;
  return res;
}

TestResult friedman(const std::vector<std::vector<double>>& blocks) {
  const int nb = static_cast<int>(blocks.size());
  if (nb < 2) throw std::invalid_argument("friedman: need >= 2 blocks");
  const int k = static_cast<int>(blocks.front().size());
  if (k < 2) throw std::invalid_argument("friedman: need >= 2 treatments");
  for (const auto& b : blocks)
    if (static_cast<int>(b.size()) != k)
      throw std::invalid_argument("friedman: ragged matrix");

  std::vector<double> rank_sums(k, 0.0);
  double tie_total = 0.0;
  for (const auto& b : blocks) {
    auto [ranks, tie_term] = midranks(b);
    for (int j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    tie_total += tie_term;
  }
  double stat = 0.0;
  for (int j = 0; j < k; ++j) stat += rank_sums[j] * rank_sums[j];
  stat = 12.0 / (nb * k * (k + 1.0)) * stat - 3.0 * nb * (k + 1.0);
  const double correction = 1.0 - tie_total / (nb * k * (static_cast<double>(k) * k - 1.0));
  if (correction > 0) stat /= correction;

  TestResult res;
  res.statistic = stat;
  res.n = nb;
  res.df = k - 1;
  res.p_value = chi2_sf(stat, res.df);
  res.method = Method::friedman_chi2;
  return res;
}

LinregResult simple_linreg(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 3 || y.size() != x.size())
    throw std::invalid_argument("simple_linreg: need n >= 3 matched points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("simple_linreg: zero x variance");

  LinregResult res;
  res.n = n;
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  const double ss_res = syy - res.slope * sxy;
  res.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  const double se2 = ss_res / (n - 2) / sxx;
  if (se2 <= 0) {
    res.p_value = 0.0;
  } else {
    const double t = res.slope / std::sqrt(se2);
    boost::math::students_t dist(n - 2);
    res.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return res;
}

TestResult anderson_darling(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 5) throw std::invalid_argument("anderson_darling: need n >= 5");
  std::vector<double> v = x;
  std::sort(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double e : v) var += (e - mean) * (e - mean);
  var /= (n - 1);
  if (var <= 0) throw std::domain_error("anderson_darling: zero variance");
  const double sd = std::sqrt(var);

  boost::math::normal norm;
  double a2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double zi = (v[i] - mean) / sd;
    const double zni = (v[n - 1 - i] - mean) / sd;
    double fi = boost::math::cdf(norm, zi);
    double fni = boost::math::cdf(norm, zni);
    fi = std::clamp(fi, 1e-15, 1.0 - 1e-15);
    fni = std::clamp(fni, 1e-15, 1.0 - 1e-15);
    a2 += (2.0 * i + 1.0) * (std::log(fi) + std::log(1.0 - fni));
  }
  a2 = -n - a2 / n;
  const double a2_star = a2 * (1.0 + 0.75 / n + 2.25 / (n * static_cast<double>(n)));

  // D'Agostino's approximation for the case with estimated parameters
  double p;
  if (a2_star >= 0.6)
    p = std::exp(1.2937 - 5.709 * a2_star + 0.0186 * a2_star * a2_star);
  else if (a2_star >= 0.34)
    p = std::exp(0.9177 - 4.279 * a2_star - 1.38 * a2_star * a2_star);
  else if (a2_star >= 0.2)
    p = 1.0 - std::exp(-8.318 + 42.796 * a2_star - 59.938 * a2_star * a2_star);
  else
    p = 1.0 - std::exp(-13.436 + 101.14 * a2_star - 223.73 * a2_star * a2_star);

  TestResult res;
  res.statistic = a2_star;
  res.p_value = std::clamp(p, 0.0, 1.0);
  res.n = n;
  res.method = Method::anderson_darling;
  return res;
}

FixedEffectsResult fixed_effects_change(
    const std::vector<std::vector<double>>& values,
    const std::vector<int>& group_of_participant) {
  const int np = static_cast<int>(values.size());
  if (np < 2 || group_of_participant.size() != values.size())
    throw std::invalid_argument("fixed_effects_change: bad shape");
  const int nt = static_cast<int>(values.front().size());
  if (nt < 2) throw std::invalid_argument("fixed_effects_change: need >= 2 timepoints");

  // timepoint effect on within-participant centered scores
  std::vector<double> tp_mean(nt, 0.0);
  double grand = 0.0;
  std::vector<std::vector<double>> centered(np, std::vector<double>(nt));
  for (int i = 0; i < np; ++i) {
    double pm = std::accumulate(values[i].begin(), values[i].end(), 0.0) / nt;
    for (int j = 0; j < nt; ++j) {
      centered[i][j] = values[i][j] - pm;
      tp_mean[j] += centered[i][j];
      grand += centered[i][j];
    }
  }
  for (int j = 0; j < nt; ++j) tp_mean[j] /= np;
  grand /= (np * nt);

  double ss_tp = 0.0, ss_err = 0.0;
  for (int j = 0; j < nt; ++j) ss_tp += np * (tp_mean[j] - grand) * (tp_mean[j] - grand);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nt; ++j) {
      const double e = centered[i][j] - tp_mean[j];
      ss_err += e * e;
    }
  const int df_tp = nt - 1;
  const int df_err = (np - 1) * (nt - 1);

  FixedEffectsResult res;
  res.timepoint.method = Method::fixed_effects_f;
  res.timepoint.df = df_tp;
  res.timepoint.n = np;
  if (ss_err > 0 && df_err > 0) {
    const double f = (ss_tp / df_tp) / (ss_err / df_err);
    res.timepoint.statistic = f;
    // F-test p via the regularized incomplete beta
    const double xbeta = df_tp * f / (df_tp * f + df_err);
    res.timepoint.p_value =
        boost::math::ibetac(df_tp / 2.0, df_err / 2.0, xbeta);
  }

  // group effect on participant means
  std::map<int, std::vector<double>> by_group;
  for (int i = 0; i < np; ++i) {
    double pm = std::accumulate(values[i].begin(), values[i].end(), 0.0) / nt;
    by_group[group_of_participant[i]].push_back(pm);
  }
  double grand_pm = 0.0;
  int total = 0;
  for (const auto& [g, v] : by_group) {
    grand_pm += std::accumulate(v.begin(), v.end(), 0.0);
    total += static_cast<int>(v.size());
  }
  grand_pm /= total;
  double ss_g = 0.0, ss_w = 0.0;
  for (const auto& [g, v] : by_group) {
    const double gm = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    ss_g += v.size() * (gm - grand_pm) * (gm - grand_pm);
    for (double e : v) ss_w += (e - gm) * (e - gm);
  }
  const int df_g = static_cast<int>(by_group.size()) - 1;
  const int df_w = total - static_cast<int>(by_group.size());
  res.group.method = Method::fixed_effects_f;
  res.group.df = df_g;
  res.group.n = total;
  if (df_g > 0 && df_w > 0 && ss_w > 0) {
    const double f = (ss_g / df_g) / (ss_w / df_w);
    res.group.statistic = f;
    const double xbeta = df_g * f / (df_g * f + df_w);
    res.group.p_value = boost::math::ibetac(df_g / 2.0, df_w / 2.0, xbeta);
  }
  return res;
}

}  // namespace finger::stats
