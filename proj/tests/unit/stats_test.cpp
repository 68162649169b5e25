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
#include <numeric>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "hype/error.hpp"
#include "hype/random.hpp"
#include "published_tables.hpp"

namespace hype {
namespace {

// Reference values computed with SciPy 1.11 and frozen here.
struct RangeCase {
  double q;
  int k;
  double df;
  double cdf;
};
constexpr RangeCase kStudentizedRange[] = {
    {3.5, 4, 56, 0.924969758105},  {2.0, 2, 10, 0.81233012913},
    {4.0, 3, 20, 0.973148889357},  {1.0, 6, 116, 0.0192425729137},
    {5.5, 4, 116, 0.999043932533}, {3.0, 2, 1000, 0.965859656144},
    {2.5, 5, 5, 0.524496241357},   {0.5, 3, 30, 0.0664297576178},
    {8.0, 10, 40, 0.999941900704},
};

const std::vector<std::vector<double>> kThreeGroups = {
    {2.1, 3.4, 1.9, 2.8, 3.0}, {4.5, 5.1, 3.9, 4.8}, {2.9, 3.3, 4.1, 3.8, 2.7, 3.5}};

TEST(Quantile, MatchesLinearInterpolationRule) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.975), 3.925);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 4.0);
  const std::vector<double> one = {7.5};
  EXPECT_DOUBLE_EQ(quantile_sorted(one, 0.3), 7.5);
}

TEST(Bootstrap, ReproducesAnIndependentResamplingLoop) {
  const std::vector<double> scores = {3, 7, 1, 9, 4, 4, 8, 2, 6, 5, 10, 0};
  BootstrapOptions options;
  options.resample_size = 7;
  options.iterations = 501;
  options.seed = 99;
  const BootstrapResult got = bootstrap_ci(scores, options);

  // Same contract, written out directly: iteration i draws from stream i.
  std::vector<double> means;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    Rng rng(derive_seed(options.seed, it));
    double sum = 0.0;
    for (std::size_t i = 0; i < options.resample_size; ++i) {
      sum += scores[rng.uniform_index(scores.size())];
    }
    means.push_back(sum / 7.0);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  std::sort(means.begin(), means.end());
  const double pos_lo = 0.025 * 500, pos_hi = 0.975 * 500;
  const double lo = means[12] + (pos_lo - 12) * (means[13] - means[12]);
  const double hi = means[487] + (pos_hi - 487) * (means[488] - means[487]);

  EXPECT_NEAR(got.mean, mean, 1e-12);
  EXPECT_NEAR(got.std, std::sqrt(ss / 500.0), 1e-12);
  EXPECT_NEAR(got.ci_low, lo, 1e-12);
  EXPECT_NEAR(got.ci_high, hi, 1e-12);
}

TEST(Bootstrap, OutputDoesNotDependOnThreadCount) {
  Rng rng(5);
  std::vector<double> scores(60);
  for (double& s : scores) s = rng.normal() * 3 + 20;
  BootstrapOptions one{30, 4000, 17, 1};
  BootstrapOptions many{30, 4000, 17, 7};
  const BootstrapResult a = bootstrap_ci(scores, one);
  const BootstrapResult b = bootstrap_ci(scores, many);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
}

TEST(Bootstrap, ConstantScoresGiveDegenerateInterval) {
  const std::vector<double> scores(12, 42.0);
  const BootstrapResult r = bootstrap_ci(scores, {});
  EXPECT_DOUBLE_EQ(r.std, 0.0);
  EXPECT_DOUBLE_EQ(r.ci_low, 42.0);
  EXPECT_DOUBLE_EQ(r.ci_high, 42.0);
}

TEST(Bootstrap, StdScalesAsPopulationSdOverRootN) {
  Rng rng(11);
  std::vector<double> scores(200);
  for (double& s : scores) s = rng.normal() * 5.0;
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / 200.0;
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  const double pop_sd = std::sqrt(ss / 200.0);
  const BootstrapResult r = bootstrap_ci(scores, {25, 20000, 3, 1});
  // Sampling error of an sd estimate from 20000 draws is about 0.5%.
  EXPECT_NEAR(r.std, pop_sd / 5.0, 0.03 * pop_sd / 5.0);
}

TEST(Bootstrap, RejectsEmptyInput) {
  EXPECT_THROW(bootstrap_ci(std::vector<double>{}, {}), Error);
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1.0}, {0, 10, 0, 1}), Error);
}

TEST(IncompleteBeta, AgreesWithBoost) {
  for (double a : {0.5, 1.0, 2.5, 15.0, 58.0}) {
    for (double b : {0.5, 1.0, 3.0, 29.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        EXPECT_NEAR(dist::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
            << a << " " << b << " " << x;
      }
    }
  }
}

TEST(Distributions, FSurvivalAgreesWithBoostAndFrozenValues) {
  EXPECT_NEAR(dist::f_survival(3.2, 3, 40), 0.033421180722892886, 1e-12);
  EXPECT_NEAR(dist::f_survival(0.7, 2, 12), 0.5157730978742727, 1e-12);
  EXPECT_NEAR(dist::f_survival(15.0, 2, 87) / 2.5293125734893e-06, 1.0, 1e-9);
  for (double f : {0.1, 1.0, 4.4, 40.0}) {
    boost::math::fisher_f_distribution<double> d(4, 25);
    EXPECT_NEAR(dist::f_survival(f, 4, 25), boost::math::cdf(boost::math::complement(d, f)),
                1e-12);
  }
  EXPECT_DOUBLE_EQ(dist::f_survival(0.0, 3, 20), 1.0);
}

TEST(Distributions, TTwoSidedAgreesWithBoostAndFrozenValues) {
  EXPECT_NEAR(dist::t_two_sided(2.3, 58), 0.025065490607834234, 1e-12);
  EXPECT_NEAR(dist::t_two_sided(-0.4, 10), 0.6975674096591229, 1e-12);
  EXPECT_NEAR(dist::t_two_sided(8.3, 58) / 1.927997204072826e-11, 1.0, 1e-8);
  boost::math::students_t_distribution<double> d(13);
  for (double t : {0.0, 0.7, 2.16, 5.0}) {
    const double expected = 2.0 * boost::math::cdf(boost::math::complement(d, t));
    EXPECT_NEAR(dist::t_two_sided(t, 13), expected, 1e-12);
  }
}

TEST(Distributions, NormalCdfAgreesWithBoost) {
  boost::math::normal_distribution<double> d;
  for (double z : {-6.0, -1.96, -0.3, 0.0, 1.0, 2.58, 7.0}) {
    EXPECT_NEAR(dist::normal_cdf(z), boost::math::cdf(d, z), 1e-15);
  }
}

TEST(Distributions, StudentizedRangeMatchesFrozenValues) {
  for (const RangeCase& c : kStudentizedRange) {
    EXPECT_NEAR(dist::studentized_range_cdf(c.q, c.k, c.df), c.cdf, 2e-7)
        << "q=" << c.q << " k=" << c.k << " df=" << c.df;
  }
}

TEST(Distributions, StudentizedRangeWithTwoMeansIsAScaledT) {
  // For k = 2, Q = sqrt(2) |T|.
  for (double df : {5.0, 18.0, 60.0}) {
    boost::math::students_t_distribution<double> t(df);
    for (double q : {0.5, 2.0, 3.7}) {
      const double expected = 1.0 - 2.0 * boost::math::cdf(boost::math::complement(t, q / std::sqrt(2.0)));
      EXPECT_NEAR(dist::studentized_range_cdf(q, 2, df), expected, 1e-7);
    }
  }
}

TEST(Distributions, StudentizedRangeIsMonotoneInQ) {
  double prev = 0.0;
  for (double q = 0.0; q <= 8.0; q += 0.25) {
    const double c = dist::studentized_range_cdf(q, 4, 30);
    EXPECT_GE(c, prev - 1e-12);
    prev = c;
  }
  EXPECT_NEAR(prev, 1.0, 1e-4);
}

TEST(Anova, MatchesFrozenValues) {
  const AnovaResult r = one_way_anova(kThreeGroups);
  EXPECT_NEAR(r.f_statistic, 13.32781881718052, 1e-10);
  EXPECT_NEAR(r.p_value, 0.0008949740180559977, 1e-12);
  EXPECT_EQ(r.df_between, 2);
  EXPECT_EQ(r.df_within, 12);
}

TEST(Anova, IdenticalGroupsGiveZeroF) {
  const std::vector<std::vector<double>> same = {{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}};
  const AnovaResult r = one_way_anova(same);
  EXPECT_DOUBLE_EQ(r.f_statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Anova, RejectsTooFewGroupsOrValues) {
  EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}}), Error);
  EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 2}, {3}}), Error);
}

TEST(Tukey, MatchesFrozenValues) {
  const TukeyResult r = tukey_hsd(kThreeGroups);
  ASSERT_EQ(r.pairs.size(), 3u);
  const double expected[] = {6.54027272e-04, 1.13295089e-01, 1.63381273e-02};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(r.pairs[i].p_value, expected[i], 2e-7) << i;
  }
  EXPECT_EQ(r.pairs[0].group_a, 0u);
  EXPECT_EQ(r.pairs[0].group_b, 1u);
  EXPECT_TRUE(r.pairs[0].significant_at_05);
  EXPECT_FALSE(r.pairs[1].significant_at_05);
  EXPECT_TRUE(r.pairs[2].significant_at_05);
  EXPECT_NEAR(r.pairs[0].mean_diff, 2.64 - 4.575, 1e-12);
}

TEST(TTest, MatchesFrozenValues) {
  const std::vector<double> a = {1, 2, 3, 4, 5.5};
  const std::vector<double> b = {2, 4, 6, 7, 9, 11};
  const TTestResult r = t_test_unpaired(a, b);
  EXPECT_NEAR(r.t_statistic, -2.0781733525353565, 1e-12);
  EXPECT_NEAR(r.p_value, 0.06746462196175682, 1e-12);
  EXPECT_EQ(r.df, 9);
  EXPECT_FALSE(r.degenerate);
}

TEST(TTest, ZeroVarianceWithDifferentMeansIsDegenerate) {
  const std::vector<double> a = {2, 2, 2};
  const std::vector<double> b = {5, 5};
  const TTestResult r = t_test_unpaired(a, b);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.p_value, 0.0);
}

// Spearman as Pearson on average ranks computed by brute-force counting.
double brute_force_rho(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) ++less;
        if (w == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Spearman, AgreesWithBruteForceRanksOnRandomTiedData) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(8);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.uniform_index(5));
      y[i] = static_cast<double>(rng.uniform_index(6));
    }
    const SpearmanResult r = spearman(x, y);
    const double bx = brute_force_rho(x, y);
    if (!std::isfinite(bx)) {
      EXPECT_FALSE(r.defined);
    } else {
      ASSERT_TRUE(r.defined);
      EXPECT_NEAR(r.rho, bx, 1e-12);
    }
  }
}

TEST(Spearman, FaceModelsAgainstFid) {
  std::vector<double> human, fid, kid, precision;
  for (const auto& rows : {std::span(fixtures::kCelebA64.data(), 4),
                           std::span(fixtures::kFfhq1024.data(), 2)}) {
    for (const auto& row : rows) {
      human.push_back(row.score);
      fid.push_back(row.fid);
      kid.push_back(row.kid);
      precision.push_back(row.precision);
    }
  }
  const SpearmanResult r = spearman(human, fid);
  // Exact: rank differences give sum d^2 = 36, rho = 1 - 6 * 36 / 210.
  EXPECT_NEAR(r.rho, 1.0 - 6.0 * 36.0 / 210.0, 1e-12);
  EXPECT_NEAR(r.rho, fixtures::kFaceModelsFidRho, 0.0005);
  EXPECT_NEAR(r.p_value, 0.957, 0.001);
  EXPECT_NEAR(spearman(human, kid).rho, fixtures::kFaceModelsKidRho, 0.0005);
  EXPECT_NEAR(spearman(human, precision).rho, fixtures::kFaceModelsPrecisionRho, 0.0005);
}

TEST(Spearman, ImageNetKidOverAllRowsFollowsTheTable) {
  std::vector<double> human, kid;
  for (const auto& row : fixtures::kImageNet5) {
    human.push_back(row.score);
    kid.push_back(row.kid);
  }
  // SciPy spearmanr on the same fifteen rows.
  EXPECT_NEAR(spearman(human, kid).rho, -0.45259, 5e-5);
  EXPECT_NEAR(spearman(human, kid).rho, brute_force_rho(human, kid), 1e-12);
}

TEST(Spearman, ConstantInputIsUndefined) {
  const std::vector<double> x = {1, 1, 1, 1};
  const std::vector<double> y = {1, 2, 3, 4};
  EXPECT_FALSE(spearman(x, y).defined);
}

TEST(Binomial, MatchesExactRationalArithmetic) {
  using boost::multiprecision::cpp_int;
  for (int n : {10, 50, 100, 300}) {
    std::vector<cpp_int> row(n + 1);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) row[i] = row[i - 1] * (n - i + 1) / i;
    const cpp_int total = cpp_int(1) << n;
    for (int k : {0, 1, n / 3, n / 2, (2 * n) / 3, n - 1, n}) {
      cpp_int upper = 0;
      for (int i = k; i <= n; ++i) upper += row[i];
      // Scale up before dividing to keep at least 64 significant bits.
      const int shift = n + 64;
      const cpp_int scaled = (upper << shift) / total;
      const double exact = std::ldexp(scaled.convert_to<double>(), -shift);
      const double got = binomial_tail(n, k, 0.5).tail_probability;
      EXPECT_NEAR(got / exact, 1.0, 1e-12) << n << " " << k;
    }
  }
}

TEST(Binomial, AgreesWithBoostForSkewedP) {
  for (double p : {0.02, 0.3, 0.65, 0.97}) {
    boost::math::binomial_distribution<double> d(80, p);
    for (int k : {0, 5, 40, 52, 79}) {
      EXPECT_NEAR(binomial_cdf(80, k, p), boost::math::cdf(d, k), 1e-13);
    }
  }
}

TEST(Binomial, QualificationTails) {
  EXPECT_NEAR(binomial_tail(100, 65, 0.5).tail_probability, 0.0017588208614850794, 1e-15);
  EXPECT_NEAR(binomial_tail(50, 33, 0.5).tail_probability, 0.016419568782134242, 1e-14);
  EXPECT_DOUBLE_EQ(binomial_cdf(10, -1, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(binomial_cdf(10, 10, 0.5), 1.0);
  EXPECT_THROW(binomial_tail(10, 11, 0.5), Error);
}

}  // namespace
}  // namespace hype
