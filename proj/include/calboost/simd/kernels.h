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

// Data-parallel inner loops used by the weak learners.
//
// Every kernel has a portable scalar reference and optional SIMD variants
// (AVX2 on x86-64, NEON on AArch64). The variant is chosen once at runtime from
// the CPU features, or forced with the CALBOOST_KERNELS environment variable
// (scalar | avx2 | neon).
//
// Reductions accumulate in four interleaved lanes combined as
// (l0 + l1) + (l2 + l3), followed by the tail in order. The scalar reference
// uses the same order and no variant uses fused multiply-add, so all variants
// return bit-identical results. This keeps experiment output byte-identical
// regardless of the host's instruction set.

#ifndef CALBOOST_SIMD_KERNELS_H_
#define CALBOOST_SIMD_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace calboost::simd {

enum class KernelLevel { kScalar, kAvx2, kNeon };

std::string_view KernelLevelName(KernelLevel level);

struct KernelTable {
  KernelLevel level;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  // w[i] -= amount * sign(w[i]), sign(0) = 0
  void (*l1_shrink)(double amount, double* w, size_t n);
  // Weighted Welford step for one observation x with weight `weight`, where
  // `ratio` = weight / (total weight after the update):
  //   d = x - mean; mean += ratio * d; m2 += (weight * d) * (x - mean)
  void (*weighted_moment_update)(const double* x, double* mean, double* m2,
                                 double weight, double ratio, size_t n);
  // sum_i (x[i] - mean[i])^2 / max(m2[i] * inv_weight, floor)
  double (*floored_diag_quad)(const double* x, const double* mean,
                              const double* m2, double inv_weight,
                              double floor, size_t n);
};

const KernelTable& ScalarKernels();

// Null when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

// Scalar first, then every SIMD variant usable on this machine.
std::vector<const KernelTable*> AvailableKernels();

const KernelTable& ActiveKernels();

// Throws std::invalid_argument if the level is unavailable on this machine.
void SetActiveKernels(KernelLevel level);

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return ActiveKernels().dot(a.data(), b.data(), a.size());
}

inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ActiveKernels().axpy(alpha, x.data(), y.data(), x.size());
}

inline void L1Shrink(double amount, std::span<double> w) {
  ActiveKernels().l1_shrink(amount, w.data(), w.size());
}

}  // namespace calboost::simd

#endif  // CALBOOST_SIMD_KERNELS_H_
