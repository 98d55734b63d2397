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

#ifndef CALBOOST_CALIBRATION_H_
#define CALBOOST_CALIBRATION_H_

#include <array>
#include <cstdint>
#include <span>

namespace calboost {

// Online Platt scaling: p(y=1|s) = 1 / (1 + exp(w1 s + w0)). A useful fit has
// w1 < 0.
struct CalibratorState {
  double w0 = 0.0;
  double w1 = 0.0;
  int64_t n_pos = 0;
  int64_t n_neg = 0;
  // Row-major inverse-Hessian approximation over (w0, w1).
  std::array<double, 4> inv_hessian = {1.0, 0.0, 0.0, 1.0};
};

inline constexpr int kBfgsIterations = 5;
inline constexpr double kArmijoC = 1e-4;
inline constexpr int kMaxHalvings = 20;

double CalibrateScore(const CalibratorState& state, double score);

struct PlattTargets {
  double positive;  // (N+ + 1) / (N+ + 2)
  double negative;  // 1 / (N- + 2)
};

PlattTargets ComputePlattTargets(int64_t n_pos, int64_t n_neg);

// Adds the positive and negative counts of `labels`. Runs every round,
// whichever action is taken.
void UpdateCounts(CalibratorState& state, std::span<const int> labels);

// Mean cross-entropy of the sigmoid against soft targets in [0, 1].
double PlattObjective(double w0, double w1, std::span<const double> scores,
                      std::span<const double> targets);

struct PlattGradient {
  double value;
  double d_w0;
  double d_w1;
};

PlattGradient PlattObjectiveWithGradient(double w0, double w1,
                                         std::span<const double> scores,
                                         std::span<const double> targets);

struct CalibrationStep {
  double loss_before = 0.0;
  double loss_after = 0.0;
  int iterations = 0;
  bool hessian_reset = false;
};

// Up to kBfgsIterations warm-started BFGS iterations with Armijo backtracking
// on the minibatch objective, using prior-corrected targets from the running
// class counts. Never increases the minibatch objective. On a non-finite
// gradient the parameters are left unchanged and the inverse Hessian resets.
// Throws std::invalid_argument on empty or mismatched inputs.
CalibrationStep UpdateCalibrator(CalibratorState& state,
                                 std::span<const double> scores,
                                 std::span<const int> labels);

}  // namespace calboost

#endif  // CALBOOST_CALIBRATION_H_
