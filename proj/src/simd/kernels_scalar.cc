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

#include <cstddef>

#include "calboost/simd/kernels.h"

namespace calboost::simd {
namespace {

double DotScalar(const double* a, const double* b, size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane[0] += a[i] * b[i];
    lane[1] += a[i + 1] * b[i + 1];
    lane[2] += a[i + 2] * b[i + 2];
    lane[3] += a[i + 3] * b[i + 3];
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyScalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void L1ShrinkScalar(double amount, double* w, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const double sign =
        static_cast<double>(w[i] > 0.0) - static_cast<double>(w[i] < 0.0);
    w[i] = w[i] - amount * sign;
  }
}

void WeightedMomentUpdateScalar(const double* x, double* mean, double* m2,
                                double weight, double ratio, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const double delta = x[i] - mean[i];
    mean[i] = mean[i] + ratio * delta;
    m2[i] = m2[i] + (weight * delta) * (x[i] - mean[i]);
  }
}

inline double FlooredTerm(double x, double mean, double m2, double inv_weight,
                          double floor) {
  const double v = m2 * inv_weight;
  const double var = v > floor ? v : floor;
  const double d = x - mean;
  return (d * d) / var;
}

double FlooredDiagQuadScalar(const double* x, const double* mean,
                             const double* m2, double inv_weight, double floor,
                             size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (size_t l = 0; l < 4; ++l) {
      lane[l] += FlooredTerm(x[i + l], mean[i + l], m2[i + l], inv_weight,
                             floor);
    }
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += FlooredTerm(x[i], mean[i], m2[i], inv_weight, floor);
  return sum;
}

}  // namespace

const KernelTable& ScalarKernels() {
  static constexpr KernelTable kTable{
      KernelLevel::kScalar,       DotScalar,
      AxpyScalar,                 L1ShrinkScalar,
      WeightedMomentUpdateScalar, FlooredDiagQuadScalar,
  };
  return kTable;
}

}  // namespace calboost::simd
