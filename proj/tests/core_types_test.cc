/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "calboost/core_types.h"
#include "gtest/gtest.h"

namespace calboost {
namespace {

struct Moments {
  double mean;
  double variance;
};

Moments SampleMoments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

TEST(ExampleTest, ValidatesLabelAndFeatures) {
  EXPECT_NO_THROW(ValidateExample({{1.0, 2.0}, 1}));
  EXPECT_NO_THROW(ValidateExample({{1.0}, -1}));
  EXPECT_THROW(ValidateExample({{1.0}, 0}), std::invalid_argument);
  EXPECT_THROW(ValidateExample({{1.0}, 2}), std::invalid_argument);
  EXPECT_THROW(ValidateExample({{NAN}, 1}), std::invalid_argument);
  EXPECT_THROW(ValidateExample({{INFINITY}, 1}), std::invalid_argument);
}

TEST(MinibatchTest, RejectsEmptyAndRaggedBatches) {
  EXPECT_THROW(ValidateMinibatch({1, {}}), std::invalid_argument);
  EXPECT_THROW(ValidateMinibatch({1, {{{1.0}, 1}, {{1.0, 2.0}, 1}}}),
               std::invalid_argument);
  EXPECT_NO_THROW(ValidateMinibatch({1, {{{1.0}, 1}, {{2.0}, -1}}}));
}

TEST(RngStreamTest, SameSeedSameSequence) {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const uint64_t va = a.NextU64();
    EXPECT_EQ(va, b.NextU64());
  }
  EXPECT_TRUE(a == b);
  EXPECT_NE(RngStream(42).NextU64(), c.NextU64());
}

TEST(RngStreamTest, FirstGaussianDrawIsReproducible) {
  RngStream a(7), b(7);
  EXPECT_EQ(SampleGaussian(0.0, 1.0, a), SampleGaussian(0.0, 1.0, b));
}

TEST(RngStreamTest, Mt19937TenThousandthOutputIsStandard) {
  // The C++ standard fixes this value for a default-seeded mt19937_64.
  std::mt19937_64 reference;
  reference.discard(9999);
  RngStream rng(std::mt19937_64::default_seed);
  for (int i = 0; i < 9999; ++i) rng.NextU64();
  EXPECT_EQ(rng.NextU64(), 9981545732273789042ULL);
  EXPECT_EQ(reference(), 9981545732273789042ULL);
}

TEST(RngStreamTest, UniformRanges) {
  RngStream rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.NextUniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = rng.NextUniformOpen();
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(RngStreamTest, NextBelowIsUnbiasedAndInRange) {
  RngStream rng(11);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) {
    const uint64_t k = rng.NextBelow(3);
    ASSERT_LT(k, 3u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_THROW(rng.NextBelow(0), std::invalid_argument);
}

TEST(PoissonTest, ZeroRateAlwaysZero) {
  RngStream rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(SamplePoisson(0.0, rng), 0);
}

TEST(PoissonTest, UnitRateMean) {
  RngStream rng(2);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(SamplePoisson(1.0, rng));
  EXPECT_NEAR(SampleMoments(xs).mean, 1.0, 0.02);
}

TEST(PoissonTest, VarianceAtRateTwo) {
  RngStream rng(5);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(SamplePoisson(2.0, rng));
  EXPECT_NEAR(SampleMoments(xs).variance, 2.0, 0.05);
}

TEST(PoissonTest, MeanMatchesRateWithinTwoPercent) {
  for (double lambda : {0.5, 1.0, 2.0}) {
    RngStream rng(17);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(SamplePoisson(lambda, rng));
    EXPECT_NEAR(SampleMoments(xs).mean, lambda, 0.02 * lambda) << lambda;
  }
}

TEST(PoissonTest, HugeRateIsCapped) {
  RngStream rng(9);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(SamplePoisson(1e9, rng), kPoissonMaxDraw);
  }
}

TEST(PoissonTest, ConsumesExactlyOneUniform) {
  RngStream a(21), b(21);
  SamplePoisson(3.0, a);
  b.NextU64();
  EXPECT_TRUE(a == b);
}

TEST(PoissonTest, RejectsInvalidRates) {
  RngStream rng(1);
  EXPECT_THROW(SamplePoisson(-1.0, rng), std::invalid_argument);
  EXPECT_THROW(SamplePoisson(NAN, rng), std::invalid_argument);
  EXPECT_THROW(SamplePoisson(INFINITY, rng), std::invalid_argument);
}

TEST(GaussianTest, StandardNormalMean) {
  RngStream rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(SampleGaussian(0.0, 1.0, rng));
  const Moments m = SampleMoments(xs);
  EXPECT_NEAR(m.mean, 0.0, 0.02);
  EXPECT_NEAR(m.variance, 1.0, 0.02);
}

TEST(GaussianTest, TinyVarianceStaysWithinFiveSigma) {
  RngStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_NEAR(SampleGaussian(5.0, 1e-12, rng), 5.0, 1e-5);
  }
}

TEST(GaussianTest, ConsumesExactlyTwoUniforms) {
  RngStream a(8), b(8);
  SampleGaussian(0.0, 1.0, a);
  b.NextU64();
  b.NextU64();
  EXPECT_TRUE(a == b);
}

TEST(GaussianTest, RejectsNonPositiveVariance) {
  RngStream rng(1);
  EXPECT_THROW(SampleGaussian(0.0, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(SampleGaussian(0.0, -1.0, rng), std::invalid_argument);
}

TEST(ShuffleTest, IsAPermutationAndDeterministic) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  RngStream ra(12), rb(12);
  Shuffle(std::span<int>(a), ra);
  Shuffle(std::span<int>(b), rb);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(sorted, expected);
}

}  // namespace
}  // namespace calboost
