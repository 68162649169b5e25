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

// Reliability and separability statistics for model scores: percentile
// bootstrap over evaluators, one-way ANOVA with Tukey HSD, pooled t-test,
// Spearman rank correlation and exact binomial tails.

#ifndef HYPE_STATS_HPP_
#define HYPE_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hype {

inline constexpr std::size_t kDefaultResampleSize = 30;
inline constexpr std::size_t kDefaultBootstrapIterations = 10000;

struct BootstrapResult {
  double mean = 0.0;     // mean of the resampled means
  double std = 0.0;      // std of the resampled means
  double ci_low = 0.0;   // 2.5th percentile
  double ci_high = 0.0;  // 97.5th percentile
  std::size_t iterations = 0;
  std::size_t resample_size = 0;
  uint64_t seed = 0;
};

struct BootstrapOptions {
  std::size_t resample_size = kDefaultResampleSize;
  std::size_t iterations = kDefaultBootstrapIterations;
  uint64_t seed = 0;
  // Worker threads; 0 picks hardware concurrency. Output does not depend on
  // this value.
  unsigned threads = 1;
};

// Each iteration draws `resample_size` scores with replacement from its own
// seed stream and records their mean.
BootstrapResult bootstrap_ci(std::span<const double> per_evaluator_scores,
                             const BootstrapOptions& options);

// Linear-interpolated quantile of sorted data (numpy's default rule).
double quantile_sorted(std::span<const double> sorted, double q);

struct AnovaResult {
  double f_statistic = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  double ms_within = 0.0;
};

// Requires >= 2 groups with >= 2 values each.
AnovaResult one_way_anova(std::span<const std::vector<double>> groups);

struct TukeyPair {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double mean_diff = 0.0;  // mean(a) - mean(b)
  double q_statistic = 0.0;
  double p_value = 1.0;
  bool significant_at_05 = false;
};

struct TukeyResult {
  std::vector<TukeyPair> pairs;  // all a < b, in lexicographic order
};

// Tukey-Kramer pairwise comparisons on the ANOVA pooled variance.
TukeyResult tukey_hsd(std::span<const std::vector<double>> groups);

struct TTestResult {
  double t_statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  // Zero pooled variance with different means: t is infinite.
  bool degenerate = false;
};

// Pooled-variance two-sided Student test; |a|, |b| >= 2.
TTestResult t_test_unpaired(std::span<const double> a, std::span<const double> b);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  // False when either input is constant; rho and p are then meaningless.
  bool defined = true;
};

// Average ranks for ties; p from the t approximation with n - 2 df.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties replaced by their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct BinomialTail {
  int n = 0;
  int k = 0;
  double p = 0.0;
  double tail_probability = 0.0;  // P[X >= k]
};

BinomialTail binomial_tail(int n, int k, double p);

// P[X <= k] for the same distribution, summed over the same terms.
double binomial_cdf(int n, int k, double p);

// Distribution functions used by the tests above.
namespace dist {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

double f_survival(double f, double df1, double df2);
double t_two_sided(double t, double df);
double normal_cdf(double z);

// P[Q <= q] for the studentized range of `k` means with `df` error degrees
// of freedom (df <= 0 means infinite). Nested adaptive quadrature.
double studentized_range_cdf(double q, int k, double df);

}  // namespace dist

}  // namespace hype

#endif  // HYPE_STATS_HPP_
