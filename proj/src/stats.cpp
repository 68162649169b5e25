// Copyright 2026 The hype-bench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hype/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hype/error.hpp"
#include "hype/random.hpp"

namespace hype {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sum_sq_dev(std::span<const double> values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum;
}

void check_groups(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) fail(ErrorKind::kInput, "need at least two groups");
  for (const auto& group : groups) {
    if (group.size() < 2) {
      fail(ErrorKind::kInput, "every group needs at least two values");
    }
    for (double v : group) {
      if (!std::isfinite(v)) fail(ErrorKind::kInput, "non-finite group value");
    }
  }
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 5000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// P[range of k iid standard normals <= w].
double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [w, k, inv_sqrt_2pi](double z) {
    const double band = dist::normal_cdf(z) - dist::normal_cdf(z - w);
    if (band <= 0.0) return 0.0;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) * std::pow(band, k - 1);
  };
  // Split where the band turns over so each panel is smooth and unimodal.
  const double mid = w / 2.0;
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double value = Quad::integrate(integrand, -9.0, mid, 12, 1e-12) +
                 Quad::integrate(integrand, mid, 9.0 + w, 12, 1e-12);
  return std::clamp(k * value, 0.0, 1.0);
}

}  // namespace

namespace dist {

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorKind::kInput, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double df1, double df2) {
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) fail(ErrorKind::kInput, "studentized range needs k >= 2");
  if (std::isnan(q)) return std::numeric_limits<double>::quiet_NaN();
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (df <= 0.0 || df > 1e6) return normal_range_cdf(q, k);

  // Integrate over s = sqrt(chi2_df / df), whose density is
  // df^(df/2) s^(df-1) exp(-df s^2 / 2) / (Gamma(df/2) 2^(df/2 - 1)).
  const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) -
                          (0.5 * df - 1.0) * std::numbers::ln2;
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density =
        log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
    return std::exp(log_density) * normal_range_cdf(q * s, k);
  };
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double mode = std::sqrt(std::max(df - 1.0, 0.0) / df);
  const double lo = std::max(0.0, mode - 14.0 * spread);
  const double hi = mode + 14.0 * spread + (df < 4.0 ? 6.0 : 0.0);
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double value = Quad::integrate(integrand, lo, mode, 12, 1e-11) +
                       Quad::integrate(integrand, mode, hi, 12, 1e-11);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace dist

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::kInput, "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lower);
  return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

BootstrapResult bootstrap_ci(std::span<const double> scores,
                             const BootstrapOptions& options) {
  if (scores.empty()) fail(ErrorKind::kInput, "bootstrap needs at least one score");
  if (options.resample_size < 1) fail(ErrorKind::kInput, "resample_size must be >= 1");
  if (options.iterations < 1) fail(ErrorKind::kInput, "iterations must be >= 1");

  std::vector<double> means(options.iterations);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t it = begin; it < end; ++it) {
      Rng rng(derive_seed(options.seed, it));
      double sum = 0.0;
      for (std::size_t i = 0; i < options.resample_size; ++i) {
        sum += scores[rng.uniform_index(scores.size())];
      }
      means[it] = sum / static_cast<double>(options.resample_size);
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency()
                                          : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, 64));
  if (threads == 1 || options.iterations < 2 * threads) {
    run_range(0, options.iterations);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (options.iterations + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(options.iterations, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_range, begin, end);
    }
  }

  BootstrapResult result;
  result.iterations = options.iterations;
  result.resample_size = options.resample_size;
  result.seed = options.seed;
  result.mean = mean_of(means);
  result.std = options.iterations > 1
                   ? std::sqrt(sum_sq_dev(means, result.mean) /
                               static_cast<double>(options.iterations - 1))
                   : 0.0;
  std::sort(means.begin(), means.end());
  result.ci_low = quantile_sorted(means, 0.025);
  result.ci_high = quantile_sorted(means, 0.975);
  return result;
}

AnovaResult one_way_anova(std::span<const std::vector<double>> groups) {
  check_groups(groups);
  std::vector<double> means;
  std::size_t total_n = 0;
  double weighted_sum = 0.0;
  for (const auto& group : groups) {
    means.push_back(mean_of(group));
    total_n += group.size();
    weighted_sum += means.back() * static_cast<double>(group.size());
  }
  const double grand = weighted_sum / static_cast<double>(total_n);
  const bool equal_means =
      std::all_of(means.begin(), means.end(), [&](double m) { return m == means[0]; });

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!equal_means) {
      ss_between += static_cast<double>(groups[g].size()) *
                    (means[g] - grand) * (means[g] - grand);
    }
    ss_within += sum_sq_dev(groups[g], means[g]);
  }

  AnovaResult result;
  result.df_between = static_cast<int>(groups.size()) - 1;
  result.df_within = static_cast<int>(total_n - groups.size());
  result.ms_within = ss_within / result.df_within;
  const double ms_between = ss_between / result.df_between;
  if (ss_within == 0.0) {
    result.f_statistic = ss_between == 0.0 ? 0.0 : kInf;
  } else {
    result.f_statistic = ms_between / result.ms_within;
  }
  result.p_value = std::clamp(
      dist::f_survival(result.f_statistic, result.df_between, result.df_within),
      0.0, 1.0);
  return result;
}

TukeyResult tukey_hsd(std::span<const std::vector<double>> groups) {
  const AnovaResult anova = one_way_anova(groups);
  const int k = static_cast<int>(groups.size());
  std::vector<double> means;
  for (const auto& group : groups) means.push_back(mean_of(group));

  TukeyResult result;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      TukeyPair pair;
      pair.group_a = a;
      pair.group_b = b;
      pair.mean_diff = means[a] - means[b];
      const double se = std::sqrt(anova.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(groups[a].size()) +
                                   1.0 / static_cast<double>(groups[b].size())));
      if (pair.mean_diff == 0.0) {
        pair.q_statistic = 0.0;
        pair.p_value = 1.0;
      } else if (se == 0.0) {
        pair.q_statistic = kInf;
        pair.p_value = 0.0;
      } else {
        pair.q_statistic = std::fabs(pair.mean_diff) / se;
        pair.p_value = std::clamp(
            1.0 - dist::studentized_range_cdf(pair.q_statistic, k, anova.df_within),
            0.0, 1.0);
      }
      pair.significant_at_05 = pair.p_value < 0.05;
      result.pairs.push_back(pair);
    }
  }
  return result;
}

TTestResult t_test_unpaired(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    fail(ErrorKind::kInput, "t-test needs at least two values per sample");
  }
  const double mean_a = mean_of(a);
  const double mean_b = mean_of(b);
  TTestResult result;
  result.df = static_cast<int>(a.size() + b.size()) - 2;
  const double pooled =
      (sum_sq_dev(a, mean_a) + sum_sq_dev(b, mean_b)) / result.df;
  const double diff = mean_a - mean_b;
  if (pooled == 0.0) {
    if (diff == 0.0) return result;
    result.degenerate = true;
    result.t_statistic = diff > 0 ? kInf : -kInf;
    result.p_value = 0.0;
    return result;
  }
  const double se = std::sqrt(pooled * (1.0 / static_cast<double>(a.size()) +
                                        1.0 / static_cast<double>(b.size())));
  result.t_statistic = diff / se;
  result.p_value = std::clamp(dist::t_two_sided(result.t_statistic, result.df), 0.0, 1.0);
  return result;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::kInput, "spearman: length mismatch");
  if (x.size() < 3) fail(ErrorKind::kInput, "spearman needs at least three pairs");
  SpearmanResult result;
  result.n = x.size();
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    result.defined = false;
    result.rho = 0.0;
    result.p_value = 1.0;
    return result;
  }
  result.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(result.n) - 2.0;
  if (std::fabs(result.rho) >= 1.0) {
    result.p_value = 0.0;
  } else {
    const double t = result.rho * std::sqrt(df / (1.0 - result.rho * result.rho));
    result.p_value = std::clamp(dist::t_two_sided(t, df), 0.0, 1.0);
  }
  return result;
}

namespace {

// Binomial pmf terms scaled so the mode term is 1. Starting at the mode and
// walking outward keeps every term in range; terms far in the tails
// underflow to zero harmlessly.
std::vector<double> scaled_binomial_terms(int n, double p) {
  std::vector<double> terms(static_cast<std::size_t>(n) + 1, 0.0);
  const double q = 1.0 - p;
  const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * p)), 0, n);
  terms[mode] = 1.0;
  for (int i = mode; i < n; ++i) {
    terms[i + 1] = terms[i] * (static_cast<double>(n - i) / (i + 1)) * (p / q);
  }
  for (int i = mode; i > 0; --i) {
    terms[i - 1] = terms[i] * (static_cast<double>(i) / (n - i + 1)) * (q / p);
  }
  return terms;
}

void check_binomial(int n, int k, double p) {
  if (n < 0) fail(ErrorKind::kInput, "binomial n must be non-negative");
  if (k < 0 || k > n) fail(ErrorKind::kInput, "binomial k must lie in [0, n]");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::kInput, "binomial p must lie in [0, 1]");
}

// Returns {P[X < k], P[X >= k]}.
std::pair<double, double> binomial_split(int n, int k, double p) {
  if (p == 0.0) return k == 0 ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
  if (p == 1.0) return {0.0, 1.0};
  const std::vector<double> terms = scaled_binomial_terms(n, p);
  double lower = 0.0;
  double upper = 0.0;
  // Smallest terms first for accuracy.
  for (int i = 0; i < k; ++i) lower += terms[i];
  for (int i = n; i >= k; --i) upper += terms[i];
  const double total = lower + upper;
  return {lower / total, upper / total};
}

}  // namespace

BinomialTail binomial_tail(int n, int k, double p) {
  check_binomial(n, k, p);
  return {n, k, p, binomial_split(n, k, p).second};
}

double binomial_cdf(int n, int k, double p) {
  if (k < 0) {
    check_binomial(n, 0, p);
    return 0.0;
  }
  if (k >= n) {
    check_binomial(n, n, p);
    return 1.0;
  }
  check_binomial(n, k + 1, p);
  return binomial_split(n, k + 1, p).first;
}

}  // namespace hype
