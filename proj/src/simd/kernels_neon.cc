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

// AArch64 variant. Two float64x2 accumulators stand in for the four reference
// lanes: acc01 holds lanes {0, 1}, acc23 holds lanes {2, 3}.

#include <arm_neon.h>

#include <cstddef>

#include "calboost/simd/kernels.h"

namespace calboost::simd {
namespace {

inline double CombineLanes(float64x2_t acc01, float64x2_t acc23) {
  return (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
         (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
}

double DotNeon(const double* a, const double* b, size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23,
                      vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = CombineLanes(acc01, acc23);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyNeon(double alpha, const double* x, double* y, size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void L1ShrinkNeon(double amount, double* w, size_t n) {
  const float64x2_t va = vdupq_n_f64(amount);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vw = vld1q_f64(w + i);
    const float64x2_t pos = vreinterpretq_f64_u64(
        vandq_u64(vcgtq_f64(vw, zero), vreinterpretq_u64_f64(one)));
    const float64x2_t neg = vreinterpretq_f64_u64(
        vandq_u64(vcltq_f64(vw, zero), vreinterpretq_u64_f64(one)));
    vst1q_f64(w + i, vsubq_f64(vw, vmulq_f64(va, vsubq_f64(pos, neg))));
  }
  for (; i < n; ++i) {
    const double sign =
        static_cast<double>(w[i] > 0.0) - static_cast<double>(w[i] < 0.0);
    w[i] = w[i] - amount * sign;
  }
}

void WeightedMomentUpdateNeon(const double* x, double* mean, double* m2,
                              double weight, double ratio, size_t n) {
  const float64x2_t vw = vdupq_n_f64(weight);
  const float64x2_t vr = vdupq_n_f64(ratio);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vm = vld1q_f64(mean + i);
    const float64x2_t delta = vsubq_f64(vx, vm);
    const float64x2_t new_mean = vaddq_f64(vm, vmulq_f64(vr, delta));
    const float64x2_t incr =
        vmulq_f64(vmulq_f64(vw, delta), vsubq_f64(vx, new_mean));
    vst1q_f64(mean + i, new_mean);
    vst1q_f64(m2 + i, vaddq_f64(vld1q_f64(m2 + i), incr));
  }
  for (; i < n; ++i) {
    const double delta = x[i] - mean[i];
    mean[i] = mean[i] + ratio * delta;
    m2[i] = m2[i] + (weight * delta) * (x[i] - mean[i]);
  }
}

inline float64x2_t FlooredTerms(const double* x, const double* mean,
                                const double* m2, float64x2_t vinv,
                                float64x2_t vfloor) {
  const float64x2_t v = vmulq_f64(vld1q_f64(m2), vinv);
  // v > floor ? v : floor, matching the scalar reference.
  const float64x2_t var = vbslq_f64(vcgtq_f64(v, vfloor), v, vfloor);
  const float64x2_t d = vsubq_f64(vld1q_f64(x), vld1q_f64(mean));
  return vdivq_f64(vmulq_f64(d, d), var);
}

double FlooredDiagQuadNeon(const double* x, const double* mean,
                           const double* m2, double inv_weight, double floor,
                           size_t n) {
  const float64x2_t vinv = vdupq_n_f64(inv_weight);
  const float64x2_t vfloor = vdupq_n_f64(floor);
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, FlooredTerms(x + i, mean + i, m2 + i, vinv, vfloor));
    acc23 = vaddq_f64(
        acc23, FlooredTerms(x + i + 2, mean + i + 2, m2 + i + 2, vinv, vfloor));
  }
  double sum = CombineLanes(acc01, acc23);
  for (; i < n; ++i) {
    const double v = m2[i] * inv_weight;
    const double var = v > floor ? v : floor;
    const double d = x[i] - mean[i];
    sum += (d * d) / var;
  }
  return sum;
}

}  // namespace

extern const KernelTable kNeonKernelTable;
constinit const KernelTable kNeonKernelTable{
    KernelLevel::kNeon,       DotNeon,
    AxpyNeon,                 L1ShrinkNeon,
    WeightedMomentUpdateNeon, FlooredDiagQuadNeon,
};

}  // namespace calboost::simd
