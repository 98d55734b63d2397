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

#include "calboost/calibration.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace calboost {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

bool IsPositiveDefinite(const std::array<double, 4>& h) {
  const double det = h[0] * h[3] - h[1] * h[2];
  return std::isfinite(det) && h[0] > 0.0 && det > 0.0 &&
         std::abs(h[1] - h[2]) <= 1e-12 * (std::abs(h[1]) + 1.0);
}

constexpr std::array<double, 4> kIdentity = {1.0, 0.0, 0.0, 1.0};

}  // namespace

double CalibrateScore(const CalibratorState& state, double score) {
  const double z = state.w1 * score + state.w0;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

PlattTargets ComputePlattTargets(int64_t n_pos, int64_t n_neg) {
  if (n_pos < 0 || n_neg < 0) throw std::invalid_argument("negative count");
  return {(static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0),
          1.0 / (static_cast<double>(n_neg) + 2.0)};
}

void UpdateCounts(CalibratorState& state, std::span<const int> labels) {
  for (int y : labels) {
    if (y > 0) {
      ++state.n_pos;
    } else {
      ++state.n_neg;
    }
  }
}

// With z = w1 s + w0 and p = 1 / (1 + e^z): -log p = softplus(z) and
// -log(1 - p) = softplus(-z), so d/dz of the per-example loss is t - p.
double PlattObjective(double w0, double w1, std::span<const double> scores,
                      std::span<const double> targets) {
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double z = w1 * scores[i] + w0;
    total += targets[i] * Softplus(z) + (1.0 - targets[i]) * Softplus(-z);
  }
  return total / static_cast<double>(scores.size());
}

PlattGradient PlattObjectiveWithGradient(double w0, double w1,
                                         std::span<const double> scores,
                                         std::span<const double> targets) {
  PlattGradient out{0.0, 0.0, 0.0};
  for (size_t i = 0; i < scores.size(); ++i) {
    const double z = w1 * scores[i] + w0;
    out.value += targets[i] * Softplus(z) + (1.0 - targets[i]) * Softplus(-z);
    const double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                              : 1.0 / (1.0 + std::exp(z));
    const double dz = targets[i] - p;
    out.d_w0 += dz;
    out.d_w1 += dz * scores[i];
  }
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  out.value *= inv_n;
  out.d_w0 *= inv_n;
  out.d_w1 *= inv_n;
  return out;
}

CalibrationStep UpdateCalibrator(CalibratorState& state,
                                 std::span<const double> scores,
                                 std::span<const int> labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    throw std::invalid_argument(
        "calibrator update needs equal-length, non-empty scores and labels");
  }
  const PlattTargets prior = ComputePlattTargets(state.n_pos, state.n_neg);
  std::vector<double> targets(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    targets[i] = labels[i] > 0 ? prior.positive : prior.negative;
  }

  CalibrationStep step;
  if (!IsPositiveDefinite(state.inv_hessian)) {
    state.inv_hessian = kIdentity;
    step.hessian_reset = true;
  }

  double x0 = state.w0;
  double x1 = state.w1;
  PlattGradient cur = PlattObjectiveWithGradient(x0, x1, scores, targets);
  step.loss_before = cur.value;
  step.loss_after = cur.value;
  if (!std::isfinite(cur.value) || !std::isfinite(cur.d_w0) ||
      !std::isfinite(cur.d_w1)) {
    state.inv_hessian = kIdentity;
    step.hessian_reset = true;
    return step;
  }

  std::array<double, 4>& h = state.inv_hessian;
  for (int iter = 0; iter < kBfgsIterations; ++iter) {
    const double g0 = cur.d_w0;
    const double g1 = cur.d_w1;
    if (std::hypot(g0, g1) < 1e-12) break;

    double d0 = -(h[0] * g0 + h[1] * g1);
    double d1 = -(h[2] * g0 + h[3] * g1);
    double slope = g0 * d0 + g1 * d1;
    if (!(slope < 0.0)) {
      h = kIdentity;
      step.hessian_reset = true;
      d0 = -g0;
      d1 = -g1;
      slope = g0 * d0 + g1 * d1;
    }

    double alpha = 1.0;
    bool accepted = false;
    double n0 = x0;
    double n1 = x1;
    double next_value = cur.value;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      n0 = x0 + alpha * d0;
      n1 = x1 + alpha * d1;
      next_value = PlattObjective(n0, n1, scores, targets);
      if (std::isfinite(next_value) &&
          next_value <= cur.value + kArmijoC * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      h = kIdentity;
      step.hessian_reset = true;
      break;
    }

    const PlattGradient next = PlattObjectiveWithGradient(n0, n1, scores, targets);
    if (!std::isfinite(next.d_w0) || !std::isfinite(next.d_w1)) {
      h = kIdentity;
      step.hessian_reset = true;
      break;
    }
    const double s0 = n0 - x0;
    const double s1 = n1 - x1;
    const double y0 = next.d_w0 - g0;
    const double y1 = next.d_w1 - g1;
    const double sy = s0 * y0 + s1 * y1;
    if (sy > 1e-12) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      const double hy0 = h[0] * y0 + h[1] * y1;
      const double hy1 = h[2] * y0 + h[3] * y1;
      const double yhy = y0 * hy0 + y1 * hy1;
      const double coeff = rho * rho * yhy + rho;
      const double h00 = h[0] - rho * (hy0 * s0 + s0 * hy0) + coeff * s0 * s0;
      const double h01 = h[1] - rho * (hy0 * s1 + s0 * hy1) + coeff * s0 * s1;
      const double h11 = h[3] - rho * (hy1 * s1 + s1 * hy1) + coeff * s1 * s1;
      h = {h00, h01, h01, h11};
      if (!IsPositiveDefinite(h)) {
        h = kIdentity;
        step.hessian_reset = true;
      }
    }
    x0 = n0;
    x1 = n1;
    cur = next;
    ++step.iterations;
  }

  state.w0 = x0;
  state.w1 = x1;
  step.loss_after = cur.value;
  return step;
}

}  // namespace calboost
