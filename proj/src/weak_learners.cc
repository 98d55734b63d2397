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

#include "calboost/weak_learners.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "calboost/simd/kernels.h"

namespace calboost {

std::string_view WeakLearnerName(WeakLearnerKind kind) {
  switch (kind) {
    case WeakLearnerKind::kNaiveBayes:
      return "nb";
    case WeakLearnerKind::kLogReg:
      return "logreg";
    case WeakLearnerKind::kLinearSvm:
      return "svm";
    case WeakLearnerKind::kPerceptron:
      return "perceptron";
  }
  return "unknown";
}

WeakLearnerKind ParseWeakLearner(std::string_view name) {
  for (WeakLearnerKind kind :
       {WeakLearnerKind::kNaiveBayes, WeakLearnerKind::kLogReg,
        WeakLearnerKind::kLinearSvm, WeakLearnerKind::kPerceptron}) {
    if (name == WeakLearnerName(kind)) return kind;
  }
  throw std::invalid_argument("unknown weak learner: " + std::string(name));
}

// -- GaussianNaiveBayes ------------------------------------------------------

void GaussianNaiveBayes::Update(std::span<const double> x, int label,
                                double weight) {
  if (dims_ == 0) {
    dims_ = x.size();
    for (ClassStats& c : classes_) {
      c.mean.assign(dims_, 0.0);
      c.m2.assign(dims_, 0.0);
    }
  }
  ClassStats& c = classes_[Slot(label)];
  c.weight += weight;
  simd::ActiveKernels().weighted_moment_update(
      x.data(), c.mean.data(), c.m2.data(), weight, weight / c.weight, dims_);
}

double GaussianNaiveBayes::ClassLogLikelihood(std::span<const double> x,
                                              int label) const {
  const ClassStats& c = classes_[Slot(label)];
  const double inv_weight = 1.0 / c.weight;
  double log_det = 0.0;
  for (double m2 : c.m2) {
    const double v = m2 * inv_weight;
    log_det += std::log(v > kVarianceFloor ? v : kVarianceFloor);
  }
  const double quad = simd::ActiveKernels().floored_diag_quad(
      x.data(), c.mean.data(), c.m2.data(), inv_weight, kVarianceFloor, dims_);
  return std::log(c.weight) - 0.5 * log_det - 0.5 * quad;
}

int GaussianNaiveBayes::Predict(std::span<const double> x) const {
  const bool has_neg = classes_[0].weight > 0.0;
  const bool has_pos = classes_[1].weight > 0.0;
  if (!has_neg) return 1;
  if (!has_pos) return -1;
  return ClassLogLikelihood(x, 1) >= ClassLogLikelihood(x, -1) ? 1 : -1;
}

// -- SgdLinearModel ----------------------------------------------------------

double SgdLinearModel::Score(std::span<const double> x) const {
  if (weights_.empty()) return bias_;
  return simd::Dot(weights_, x) + bias_;
}

double SgdLinearModel::LossDerivative(double score, int label) const {
  const double y = label;
  const double margin = y * score;
  switch (loss_) {
    case SgdLoss::kLogistic: {
      // d/ds log(1 + exp(-y s)) = -y * sigmoid(-y s)
      const double sig = margin >= 0.0
                             ? std::exp(-margin) / (1.0 + std::exp(-margin))
                             : 1.0 / (1.0 + std::exp(margin));
      return -y * sig;
    }
    case SgdLoss::kHinge:
      // Subgradient 0 at the kink.
      return margin < 1.0 ? -y : 0.0;
    case SgdLoss::kPerceptron:
      return margin <= 0.0 ? -y : 0.0;
  }
  return 0.0;
}

void SgdLinearModel::Update(std::span<const double> x, int label,
                            double weight) {
  if (weights_.empty()) weights_.assign(x.size(), 0.0);
  const double grad = LossDerivative(Score(x), label);
  if (grad != 0.0) {
    const double step = -params_.learning_rate * weight * grad;
    simd::Axpy(step, x, weights_);
    bias_ += step;
  }
  if (params_.l1 > 0.0) {
    simd::L1Shrink(params_.learning_rate * params_.l1, weights_);
  }
  if (!std::isfinite(bias_)) {
    throw std::overflow_error("SGD update produced a non-finite bias");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw std::overflow_error("SGD update produced a non-finite weight");
    }
  }
}

// -- WeakLearner -------------------------------------------------------------

WeakLearner WeakLearner::Make(WeakLearnerKind kind, SgdParams params) {
  switch (kind) {
    case WeakLearnerKind::kNaiveBayes:
      return WeakLearner(kind, GaussianNaiveBayes{});
    case WeakLearnerKind::kLogReg:
      return WeakLearner(kind, SgdLinearModel(SgdLoss::kLogistic, params));
    case WeakLearnerKind::kLinearSvm:
      return WeakLearner(kind, SgdLinearModel(SgdLoss::kHinge, params));
    case WeakLearnerKind::kPerceptron:
      return WeakLearner(kind, SgdLinearModel(SgdLoss::kPerceptron, params));
  }
  throw std::invalid_argument("unknown weak learner kind");
}

void WeakLearner::Update(std::span<const double> x, int label, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("weak learner weight must be finite and > 0");
  }
  if (label != 1 && label != -1) {
    throw std::invalid_argument("label must be -1 or +1");
  }
  if (x.empty()) throw std::invalid_argument("empty feature vector");
  if (dims_ == 0) {
    dims_ = x.size();
  } else if (x.size() != dims_) {
    throw std::invalid_argument("feature dimension " + std::to_string(x.size()) +
                                " does not match " + std::to_string(dims_));
  }
  std::visit([&](auto& model) { model.Update(x, label, weight); }, model_);
}

int WeakLearner::Predict(std::span<const double> x) const {
  if (dims_ != 0 && x.size() != dims_) {
    throw std::invalid_argument("feature dimension " + std::to_string(x.size()) +
                                " does not match " + std::to_string(dims_));
  }
  if (dims_ == 0) return 1;
  return std::visit([&](const auto& model) { return model.Predict(x); },
                    model_);
}

}  // namespace calboost
