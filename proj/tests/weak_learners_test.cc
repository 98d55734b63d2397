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
#include <vector>

#include "calboost/core_types.h"
#include "calboost/simd/kernels.h"
#include "calboost/weak_learners.h"
#include "gtest/gtest.h"

namespace calboost {
namespace {

struct Weighted {
  std::vector<double> x;
  int label;
  double weight;
};

// Two-pass batch oracle in long double over the weighted multiset.
struct BatchStats {
  long double weight = 0.0L;
  std::vector<long double> mean;
  std::vector<long double> m2;
};

BatchStats BatchOracle(const std::vector<Weighted>& data, int label, size_t d) {
  BatchStats s;
  s.mean.assign(d, 0.0L);
  s.m2.assign(d, 0.0L);
  for (const Weighted& e : data) {
    if (e.label != label) continue;
    s.weight += e.weight;
    for (size_t j = 0; j < d; ++j) s.mean[j] += e.weight * e.x[j];
  }
  if (s.weight == 0.0L) return s;
  for (size_t j = 0; j < d; ++j) s.mean[j] /= s.weight;
  for (const Weighted& e : data) {
    if (e.label != label) continue;
    for (size_t j = 0; j < d; ++j) {
      const long double dev = e.x[j] - s.mean[j];
      s.m2[j] += e.weight * dev * dev;
    }
  }
  return s;
}

std::vector<Weighted> RandomSequence(RngStream& rng, size_t d, bool integer) {
  const size_t n = 5 + rng.NextBelow(60);
  std::vector<Weighted> out;
  for (size_t i = 0; i < n; ++i) {
    Weighted e;
    e.label = rng.NextBelow(2) ? 1 : -1;
    for (size_t j = 0; j < d; ++j) {
      e.x.push_back(SampleGaussian(e.label * 3.0, 4.0, rng));
    }
    e.weight = integer ? static_cast<double>(1 + rng.NextBelow(5))
                       : 0.05 + 3.0 * rng.NextUniform();
    out.push_back(e);
  }
  return out;
}

void ExpectMatchesOracle(const GaussianNaiveBayes& nb,
                         const std::vector<Weighted>& data, size_t d) {
  for (int label : {-1, 1}) {
    const BatchStats want = BatchOracle(data, label, d);
    const auto& got = nb.stats(label);
    EXPECT_NEAR(got.weight, static_cast<double>(want.weight), 1e-9);
    if (want.weight == 0.0L) continue;
    for (size_t j = 0; j < d; ++j) {
      EXPECT_NEAR(got.mean[j], static_cast<double>(want.mean[j]), 1e-9);
      const double var_got = got.m2[j] / got.weight;
      const double var_want = static_cast<double>(want.m2[j] / want.weight);
      EXPECT_NEAR(var_got, var_want, 1e-9);
    }
  }
}

TEST(WeakLearnerKindTest, NamesRoundTrip) {
  for (auto kind : {WeakLearnerKind::kNaiveBayes, WeakLearnerKind::kLogReg,
                    WeakLearnerKind::kLinearSvm, WeakLearnerKind::kPerceptron}) {
    EXPECT_EQ(ParseWeakLearner(WeakLearnerName(kind)), kind);
  }
  EXPECT_THROW(ParseWeakLearner("tree"), std::invalid_argument);
  EXPECT_TRUE(IsLossless(WeakLearnerKind::kNaiveBayes));
  EXPECT_FALSE(IsLossless(WeakLearnerKind::kLogReg));
}

TEST(NaiveBayesTest, IntegerWeightsMatchExpandedBatchStatistics) {
  RngStream rng(101);
  for (int seq = 0; seq < 100; ++seq) {
    const size_t d = 1 + rng.NextBelow(6);
    const auto data = RandomSequence(rng, d, /*integer=*/true);
    GaussianNaiveBayes online;
    GaussianNaiveBayes expanded;
    for (const Weighted& e : data) {
      online.Update(e.x, e.label, e.weight);
      for (int k = 0; k < static_cast<int>(e.weight); ++k) {
        expanded.Update(e.x, e.label, 1.0);
      }
    }
    ExpectMatchesOracle(online, data, d);
    ExpectMatchesOracle(expanded, data, d);
  }
}

TEST(NaiveBayesTest, RealWeightsMatchBatchStatistics) {
  RngStream rng(202);
  for (int seq = 0; seq < 100; ++seq) {
    const size_t d = 1 + rng.NextBelow(6);
    const auto data = RandomSequence(rng, d, /*integer=*/false);
    GaussianNaiveBayes nb;
    for (const Weighted& e : data) nb.Update(e.x, e.label, e.weight);
    ExpectMatchesOracle(nb, data, d);
  }
}

TEST(NaiveBayesTest, PermutationInvariant) {
  RngStream rng(303);
  for (int seq = 0; seq < 50; ++seq) {
    const size_t d = 1 + rng.NextBelow(4);
    auto data = RandomSequence(rng, d, /*integer=*/false);
    GaussianNaiveBayes a, b;
    for (const Weighted& e : data) a.Update(e.x, e.label, e.weight);
    Shuffle(std::span<Weighted>(data), rng);
    for (const Weighted& e : data) b.Update(e.x, e.label, e.weight);
    for (int label : {-1, 1}) {
      const auto& sa = a.stats(label);
      const auto& sb = b.stats(label);
      EXPECT_NEAR(sa.weight, sb.weight, 1e-9);
      if (sa.weight == 0.0) continue;
      for (size_t j = 0; j < sa.mean.size(); ++j) {
        EXPECT_NEAR(sa.mean[j], sb.mean[j], 1e-9);
        EXPECT_NEAR(sa.m2[j] / sa.weight, sb.m2[j] / sb.weight, 1e-9);
      }
    }
  }
}

TEST(NaiveBayesTest, TwoUnitUpdatesEqualOneDoubleUpdate) {
  GaussianNaiveBayes a, b;
  const std::vector<double> x0 = {1.0, -2.0}, x1 = {3.0, 0.5};
  a.Update(x0, 1, 1.0);
  b.Update(x0, 1, 1.0);
  a.Update(x1, 1, 1.0);
  a.Update(x1, 1, 1.0);
  b.Update(x1, 1, 2.0);
  EXPECT_EQ(a.stats(1).weight, b.stats(1).weight);
  for (size_t j = 0; j < 2; ++j) {
    EXPECT_DOUBLE_EQ(a.stats(1).mean[j], b.stats(1).mean[j]);
    EXPECT_DOUBLE_EQ(a.stats(1).m2[j], b.stats(1).m2[j]);
  }
}

TEST(NaiveBayesTest, NonNegativeStatistics) {
  RngStream rng(404);
  GaussianNaiveBayes nb;
  for (int i = 0; i < 2000; ++i) {
    const int label = rng.NextBelow(2) ? 1 : -1;
    nb.Update(std::vector<double>{SampleGaussian(0.0, 1e6, rng), 1.0}, label,
              0.01 + rng.NextUniform());
  }
  for (int label : {-1, 1}) {
    EXPECT_GE(nb.stats(label).weight, 0.0);
    for (double m2 : nb.stats(label).m2) EXPECT_GE(m2, 0.0);
  }
}

TEST(NaiveBayesTest, PredictsNearerClassWithFlooredVariance) {
  WeakLearner nb = WeakLearner::Make(WeakLearnerKind::kNaiveBayes);
  nb.Update(std::vector<double>{0.0}, -1, 1.0);
  nb.Update(std::vector<double>{10.0}, 1, 1.0);
  EXPECT_EQ(nb.Predict(std::vector<double>{9.0}), 1);
  EXPECT_EQ(nb.Predict(std::vector<double>{1.0}), -1);
  // Hand evaluation: both variances floor at 1e-9, equal weights.
  const GaussianNaiveBayes& g = *nb.naive_bayes();
  const double diff = g.ClassLogLikelihood(std::vector<double>{9.0}, 1) -
                      g.ClassLogLikelihood(std::vector<double>{9.0}, -1);
  EXPECT_NEAR(diff, 0.5 * (81.0 - 1.0) / kVarianceFloor, 1e-3);
}

TEST(NaiveBayesTest, SingleObservedClassWins) {
  WeakLearner nb = WeakLearner::Make(WeakLearnerKind::kNaiveBayes);
  nb.Update(std::vector<double>{0.0}, -1, 1.0);
  EXPECT_EQ(nb.Predict(std::vector<double>{100.0}), -1);
}

TEST(SgdTest, LogisticFirstStepFromZero) {
  WeakLearner lr = WeakLearner::Make(WeakLearnerKind::kLogReg);
  lr.Update(std::vector<double>{1.0}, 1, 1.0);
  const SgdLinearModel& m = *lr.linear();
  // eta * sigma(0) = 0.01 * 0.5
  EXPECT_DOUBLE_EQ(m.weights()[0], 0.005);
  EXPECT_DOUBLE_EQ(m.bias(), 0.005);
}

TEST(SgdTest, LinearScoreZeroPredictsPositive) {
  SgdLinearModel m(SgdLoss::kLogistic, {});
  m.set_weights({0.0}, 0.0);
  EXPECT_EQ(m.Predict(std::vector<double>{5.0}), 1);
  m.set_weights({1.0}, 0.0);
  EXPECT_EQ(m.Predict(std::vector<double>{-2.0}), -1);
}

TEST(SgdTest, LossDerivatives) {
  SgdLinearModel logistic(SgdLoss::kLogistic, {});
  EXPECT_DOUBLE_EQ(logistic.LossDerivative(0.0, 1), -0.5);
  EXPECT_DOUBLE_EQ(logistic.LossDerivative(0.0, -1), 0.5);
  SgdLinearModel hinge(SgdLoss::kHinge, {});
  EXPECT_EQ(hinge.LossDerivative(0.5, 1), -1.0);
  EXPECT_EQ(hinge.LossDerivative(1.0, 1), 0.0);  // subgradient 0 at the kink
  EXPECT_EQ(hinge.LossDerivative(-1.0, -1), 0.0);
  SgdLinearModel perceptron(SgdLoss::kPerceptron, {});
  EXPECT_EQ(perceptron.LossDerivative(0.0, 1), -1.0);
  EXPECT_EQ(perceptron.LossDerivative(0.1, 1), 0.0);
  EXPECT_EQ(perceptron.LossDerivative(0.1, -1), 1.0);
}

TEST(SgdTest, PerceptronFirstUpdateScalesWithWeight) {
  for (double k : {1.0, 2.0, 5.0}) {
    WeakLearner p = WeakLearner::Make(WeakLearnerKind::kPerceptron);
    p.Update(std::vector<double>{2.0, -1.0}, -1, k);
    const SgdLinearModel& m = *p.linear();
    EXPECT_DOUBLE_EQ(m.weights()[0], -k * 0.01 * 2.0);
    EXPECT_DOUBLE_EQ(m.weights()[1], k * 0.01 * 1.0);
    EXPECT_DOUBLE_EQ(m.bias(), -k * 0.01);
  }
}

TEST(SgdTest, PerceptronWeightKEqualsKUnitStepsWhileMisclassified) {
  RngStream rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t d = 1 + rng.NextBelow(5);
    std::vector<double> x(d), w(d);
    for (size_t j = 0; j < d; ++j) x[j] = SampleGaussian(0.0, 1.0, rng);
    const int y = rng.NextBelow(2) ? 1 : -1;
    const int k = 1 + static_cast<int>(rng.NextBelow(6));
    // Start far enough on the wrong side that k unit steps stay wrong.
    double norm2 = 1.0;
    for (double v : x) norm2 += v * v;
    const double push = -(k + 1) * 0.01 * norm2 - 1.0;
    for (size_t j = 0; j < d; ++j) w[j] = y * push * x[j] / norm2;
    const double bias = y * push / norm2;

    SgdLinearModel once(SgdLoss::kPerceptron, {});
    SgdLinearModel steps(SgdLoss::kPerceptron, {});
    once.set_weights(w, bias);
    steps.set_weights(w, bias);
    once.Update(x, y, static_cast<double>(k));
    for (int i = 0; i < k; ++i) steps.Update(x, y, 1.0);
    for (size_t j = 0; j < d; ++j) {
      EXPECT_NEAR(once.weights()[j], steps.weights()[j], 1e-12);
    }
    EXPECT_NEAR(once.bias(), steps.bias(), 1e-12);
  }
}

TEST(SgdTest, L1ShrinksWeightsButNotBias) {
  SgdLinearModel m(SgdLoss::kHinge, {0.01, 0.1});
  m.set_weights({0.5, -0.5}, 0.5);
  // Score 0.5 < 1 with y = +1: hinge step then shrink by eta * l1.
  m.Update(std::vector<double>{1.0, 1.0}, 1, 1.0);
  EXPECT_DOUBLE_EQ(m.weights()[0], 0.5 + 0.01 - 0.001);
  EXPECT_DOUBLE_EQ(m.weights()[1], -0.5 + 0.01 + 0.001);
  EXPECT_DOUBLE_EQ(m.bias(), 0.51);
}

TEST(SgdTest, WeightsStayFinite) {
  RngStream rng(606);
  for (auto kind : {WeakLearnerKind::kLogReg, WeakLearnerKind::kLinearSvm,
                    WeakLearnerKind::kPerceptron}) {
    WeakLearner learner = WeakLearner::Make(kind, {0.01, 0.01});
    for (int i = 0; i < 5000; ++i) {
      const int y = rng.NextBelow(2) ? 1 : -1;
      std::vector<double> x = {SampleGaussian(y, 100.0, rng),
                               SampleGaussian(0.0, 1.0, rng)};
      learner.Update(x, y, 0.1 + 10.0 * rng.NextUniform());
      for (double w : learner.linear()->weights()) ASSERT_TRUE(std::isfinite(w));
    }
  }
}

TEST(WeakLearnerTest, RejectsBadUpdates) {
  WeakLearner learner = WeakLearner::Make(WeakLearnerKind::kNaiveBayes);
  const std::vector<double> x = {1.0, 2.0};
  EXPECT_THROW(learner.Update(x, 1, 0.0), std::invalid_argument);
  EXPECT_THROW(learner.Update(x, 1, -1.0), std::invalid_argument);
  EXPECT_THROW(learner.Update(x, 1, NAN), std::invalid_argument);
  EXPECT_THROW(learner.Update(x, 0, 1.0), std::invalid_argument);
  learner.Update(x, 1, 1.0);
  EXPECT_THROW(learner.Update(std::vector<double>{1.0}, 1, 1.0),
               std::invalid_argument);
  EXPECT_THROW(learner.Predict(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(WeakLearnerTest, UntrainedPredictsPositive) {
  for (auto kind : {WeakLearnerKind::kNaiveBayes, WeakLearnerKind::kLogReg,
                    WeakLearnerKind::kLinearSvm, WeakLearnerKind::kPerceptron}) {
    EXPECT_EQ(WeakLearner::Make(kind).Predict(std::vector<double>{-3.0}), 1);
  }
}

TEST(WeakLearnerTest, ResultsIndependentOfKernelVariant) {
  const auto tables = simd::AvailableKernels();
  const simd::KernelLevel original = simd::ActiveKernels().level;
  std::vector<std::vector<double>> weights;
  for (const simd::KernelTable* table : tables) {
    simd::SetActiveKernels(table->level);
    RngStream rng(707);
    WeakLearner lr = WeakLearner::Make(WeakLearnerKind::kLogReg, {0.01, 0.001});
    for (int i = 0; i < 500; ++i) {
      const int y = rng.NextBelow(2) ? 1 : -1;
      std::vector<double> x(13);
      for (double& v : x) v = SampleGaussian(0.5 * y, 1.0, rng);
      lr.Update(x, y, 1.0);
    }
    std::vector<double> w(lr.linear()->weights().begin(),
                          lr.linear()->weights().end());
    w.push_back(lr.linear()->bias());
    weights.push_back(w);
  }
  simd::SetActiveKernels(original);
  for (const auto& w : weights) EXPECT_EQ(w, weights.front());
}

}  // namespace
}  // namespace calboost
