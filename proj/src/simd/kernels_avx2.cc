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

// Compiled with -mavx2 (no -mfma). Nothing in this file may run before the
// dispatcher has checked for AVX2 support, so the table is constant-initialized.

#include <immintrin.h>

#include <cstddef>

#include "calboost/simd/kernels.h"

namespace calboost::simd {
namespace {

inline double HorizontalSum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double DotAvx2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod =
        _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyAvx2(double alpha, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void L1ShrinkAvx2(double amount, double* w, size_t n) {
  const __m256d va = _mm256_set1_pd(amount);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(vw, zero, _CMP_GT_OQ), one);
    const __m256d neg = _mm256_and_pd(_mm256_cmp_pd(vw, zero, _CMP_LT_OQ), one);
    const __m256d sign = _mm256_sub_pd(pos, neg);
    _mm256_storeu_pd(w + i, _mm256_sub_pd(vw, _mm256_mul_pd(va, sign)));
  }
  for (; i < n; ++i) {
    const double sign =
        static_cast<double>(w[i] > 0.0) - static_cast<double>(w[i] < 0.0);
    w[i] = w[i] - amount * sign;
  }
}

void WeightedMomentUpdateAvx2(const double* x, double* mean, double* m2,
                              double weight, double ratio, size_t n) {
  const __m256d vw = _mm256_set1_pd(weight);
  const __m256d vr = _mm256_set1_pd(ratio);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vm = _mm256_loadu_pd(mean + i);
    const __m256d delta = _mm256_sub_pd(vx, vm);
    const __m256d new_mean = _mm256_add_pd(vm, _mm256_mul_pd(vr, delta));
    const __m256d incr = _mm256_mul_pd(_mm256_mul_pd(vw, delta),
                                       _mm256_sub_pd(vx, new_mean));
    _mm256_storeu_pd(mean + i, new_mean);
    _mm256_storeu_pd(m2 + i, _mm256_add_pd(_mm256_loadu_pd(m2 + i), incr));
  }
  for (; i < n; ++i) {
    const double delta = x[i] - mean[i];
    mean[i] = mean[i] + ratio * delta;
    m2[i] = m2[i] + (weight * delta) * (x[i] - mean[i]);
  }
}

double FlooredDiagQuadAvx2(const double* x, const double* mean,
                           const double* m2, double inv_weight, double floor,
                           size_t n) {
  const __m256d vinv = _mm256_set1_pd(inv_weight);
  const __m256d vfloor = _mm256_set1_pd(floor);
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d var =
        _mm256_max_pd(_mm256_mul_pd(_mm256_loadu_pd(m2 + i), vinv), vfloor);
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_mul_pd(d, d), var));
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) {
    const double v = m2[i] * inv_weight;
    const double var = v > floor ? v : floor;
    const double d = x[i] - mean[i];
    sum += (d * d) / var;
  }
  return sum;
}

}  // namespace

extern const KernelTable kAvx2KernelTable;
constinit const KernelTable kAvx2KernelTable{
    KernelLevel::kAvx2,       DotAvx2,
    AxpyAvx2,                 L1ShrinkAvx2,
    WeightedMomentUpdateAvx2, FlooredDiagQuadAvx2,
};

}  // namespace calboost::simd
