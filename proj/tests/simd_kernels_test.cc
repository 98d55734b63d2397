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

#include <cstdlib>
#include <vector>

#include "calboost/core_types.h"
#include "calboost/simd/kernels.h"
#include "gtest/gtest.h"

namespace calboost::simd {
namespace {

std::vector<double> RandomVector(size_t n, RngStream& rng, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = SampleGaussian(0.0, scale * scale, rng);
  return v;
}

// Independent oracle with the documented lane order.
double LaneOrderedDot(const std::vector<double>& a, const std::vector<double>& b) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  const size_t blocks = a.size() / 4 * 4;
  for (size_t i = 0; i < blocks; i += 4) {
    for (size_t l = 0; l < 4; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (size_t i = blocks; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

class KernelEquivalenceTest : public ::testing::TestWithParam<size_t> {};

TEST(KernelDispatchTest, ScalarIsAlwaysAvailableAndFirst) {
  const auto tables = AvailableKernels();
  ASSERT_FALSE(tables.empty());
  EXPECT_EQ(tables.front()->level, KernelLevel::kScalar);
  EXPECT_EQ(KernelLevelName(KernelLevel::kScalar), "scalar");
}

TEST(KernelDispatchTest, SetActiveRoundTrips) {
  const KernelLevel original = ActiveKernels().level;
  SetActiveKernels(KernelLevel::kScalar);
  EXPECT_EQ(ActiveKernels().level, KernelLevel::kScalar);
  SetActiveKernels(original);
  EXPECT_EQ(ActiveKernels().level, original);
}

TEST(KernelDispatchTest, UnavailableLevelThrows) {
#if defined(__x86_64__)
  EXPECT_THROW(SetActiveKernels(KernelLevel::kNeon), std::invalid_argument);
#elif defined(__aarch64__)
  EXPECT_THROW(SetActiveKernels(KernelLevel::kAvx2), std::invalid_argument);
#endif
}

TEST(ScalarKernelTest, DotMatchesLaneOrderedOracle) {
  RngStream rng(1);
  for (size_t n = 0; n < 40; ++n) {
    const auto a = RandomVector(n, rng, 3.0);
    const auto b = RandomVector(n, rng, 3.0);
    EXPECT_EQ(ScalarKernels().dot(a.data(), b.data(), n), LaneOrderedDot(a, b));
  }
}

TEST(ScalarKernelTest, ElementwiseKernelsMatchDefinitions) {
  std::vector<double> w = {1.0, -1.0, 0.0, 0.05, -0.05};
  ScalarKernels().l1_shrink(0.1, w.data(), w.size());
  EXPECT_EQ(w, (std::vector<double>{0.9, -0.9, 0.0, 0.05 - 0.1, -0.05 + 0.1}));

  std::vector<double> y = {1.0, 2.0};
  const std::vector<double> x = {3.0, -4.0};
  ScalarKernels().axpy(0.5, x.data(), y.data(), 2);
  EXPECT_EQ(y, (std::vector<double>{2.5, 0.0}));

  std::vector<double> mean = {0.0}, m2 = {0.0};
  const double x0[] = {2.0};
  ScalarKernels().weighted_moment_update(x0, mean.data(), m2.data(), 1.0, 1.0, 1);
  EXPECT_EQ(mean[0], 2.0);
  EXPECT_EQ(m2[0], 0.0);
  const double x1[] = {4.0};
  ScalarKernels().weighted_moment_update(x1, mean.data(), m2.data(), 1.0, 0.5, 1);
  EXPECT_EQ(mean[0], 3.0);
  EXPECT_EQ(m2[0], 2.0);

  const double q[] = {1.0, 3.0};
  const double mu[] = {0.0, 0.0};
  const double s2[] = {4.0, 0.0};
  // Variances 2 and floor 0.5: 1/2 + 9/0.5.
  EXPECT_EQ(ScalarKernels().floored_diag_quad(q, mu, s2, 0.5, 0.5, 2), 18.5);
}

TEST_P(KernelEquivalenceTest, EveryVariantIsBitIdenticalToScalar) {
  const size_t n = GetParam();
  const KernelTable& ref = ScalarKernels();
  for (const KernelTable* table : AvailableKernels()) {
    RngStream rng(1000 + n);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = RandomVector(n, rng, 10.0);
      const auto b = RandomVector(n, rng, 10.0);
      EXPECT_EQ(table->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n));

      auto y1 = b, y2 = b;
      table->axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      EXPECT_EQ(y1, y2);

      auto w1 = a, w2 = a;
      table->l1_shrink(0.7, w1.data(), n);
      ref.l1_shrink(0.7, w2.data(), n);
      EXPECT_EQ(w1, w2);

      auto mean1 = b, mean2 = b;
      std::vector<double> m2_1(n), m2_2(n);
      for (size_t i = 0; i < n; ++i) m2_1[i] = m2_2[i] = std::abs(a[i]);
      table->weighted_moment_update(a.data(), mean1.data(), m2_1.data(), 2.5,
                                    0.3, n);
      ref.weighted_moment_update(a.data(), mean2.data(), m2_2.data(), 2.5, 0.3,
                                 n);
      EXPECT_EQ(mean1, mean2);
      EXPECT_EQ(m2_1, m2_2);

      EXPECT_EQ(table->floored_diag_quad(a.data(), b.data(), m2_1.data(), 0.25,
                                         1e-9, n),
                ref.floored_diag_quad(a.data(), b.data(), m2_1.data(), 0.25,
                                      1e-9, n));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalenceTest,
                         ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16,
                                           17, 31, 57, 64, 100, 1001));

}  // namespace
}  // namespace calboost::simd
