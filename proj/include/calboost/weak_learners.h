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

#ifndef CALBOOST_WEAK_LEARNERS_H_
#define CALBOOST_WEAK_LEARNERS_H_

#include <array>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace calboost {

enum class WeakLearnerKind { kNaiveBayes, kLogReg, kLinearSvm, kPerceptron };

std::string_view WeakLearnerName(WeakLearnerKind kind);
// Accepts "nb", "logreg", "svm", "perceptron". Throws std::invalid_argument.
WeakLearnerKind ParseWeakLearner(std::string_view name);

// Naive Bayes is lossless; the SGD learners are not.
inline bool IsLossless(WeakLearnerKind kind) {
  return kind == WeakLearnerKind::kNaiveBayes;
}

inline constexpr double kDefaultLearningRate = 0.01;
inline constexpr double kVarianceFloor = 1e-9;

struct SgdParams {
  double learning_rate = kDefaultLearningRate;
  double l1 = 0.0;
};

// Gaussian Naive Bayes with weighted sufficient statistics per class: total
// weight, per-feature mean and weighted sum of squared deviations (M2).
class GaussianNaiveBayes {
 public:
  struct ClassStats {
    double weight = 0.0;
    std::vector<double> mean;
    std::vector<double> m2;
  };

  void Update(std::span<const double> x, int label, double weight);
  int Predict(std::span<const double> x) const;

  // Log joint density up to a class-independent constant. Requires the class
  // to have been observed.
  double ClassLogLikelihood(std::span<const double> x, int label) const;

  const ClassStats& stats(int label) const { return classes_[Slot(label)]; }
  size_t dims() const { return dims_; }

 private:
  static size_t Slot(int label) { return label > 0 ? 1 : 0; }

  size_t dims_ = 0;
  std::array<ClassStats, 2> classes_;
};

enum class SgdLoss { kLogistic, kHinge, kPerceptron };

// Linear model trained by plain SGD with optional L1 shrinkage on the
// weights (not the bias). Predicts sign(w.x + b) with sign(0) = +1.
class SgdLinearModel {
 public:
  SgdLinearModel(SgdLoss loss, SgdParams params)
      : loss_(loss), params_(params) {}

  void Update(std::span<const double> x, int label, double weight);
  int Predict(std::span<const double> x) const {
    return Score(x) >= 0.0 ? 1 : -1;
  }
  double Score(std::span<const double> x) const;

  // Derivative of the per-example loss with respect to the linear score.
  double LossDerivative(double score, int label) const;

  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }
  SgdLoss loss() const { return loss_; }
  const SgdParams& params() const { return params_; }

  void set_weights(std::vector<double> w, double bias) {
    weights_ = std::move(w);
    bias_ = bias;
  }

 private:
  SgdLoss loss_;
  SgdParams params_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// Closed set of base learners behind one value type.
class WeakLearner {
 public:
  static WeakLearner Make(WeakLearnerKind kind, SgdParams params = {});

  // Throws std::invalid_argument on a non-positive or non-finite weight, a
  // bad label, or a dimension that disagrees with earlier updates.
  void Update(std::span<const double> x, int label, double weight);
  int Predict(std::span<const double> x) const;

  WeakLearnerKind kind() const { return kind_; }
  size_t dims() const { return dims_; }

  const GaussianNaiveBayes* naive_bayes() const {
    return std::get_if<GaussianNaiveBayes>(&model_);
  }
  const SgdLinearModel* linear() const {
    return std::get_if<SgdLinearModel>(&model_);
  }

 private:
  WeakLearner(WeakLearnerKind kind, std::variant<GaussianNaiveBayes, SgdLinearModel> model)
      : kind_(kind), model_(std::move(model)) {}

  WeakLearnerKind kind_;
  size_t dims_ = 0;
  std::variant<GaussianNaiveBayes, SgdLinearModel> model_;
};

}  // namespace calboost

#endif  // CALBOOST_WEAK_LEARNERS_H_
