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

#ifndef CALBOOST_ONLINE_BOOST_H_
#define CALBOOST_ONLINE_BOOST_H_

#include <span>
#include <string_view>
#include <vector>

#include "calboost/core_types.h"
#include "calboost/weak_learners.h"

namespace calboost {

// Weighted errors are clamped to [kErrorClamp, 1 - kErrorClamp] before they
// are used as divisors or inside a logarithm.
inline constexpr double kErrorClamp = 1e-10;

double ClampError(double epsilon);

// log((1 - eps) / eps). Throws std::invalid_argument unless 0 < eps < 1.
double Confidence(double epsilon);

// Pure scoring functions over per-learner confidences and votes (+-1).

// F(x) = sum_t beta_t h_t(x).
double EnsembleOutput(std::span<const double> betas, std::span<const int> votes);

// Confidence-weighted fraction of positive votes, sum_{h_t=+1} beta_t /
// sum_t beta_t, clamped to [0, 1]. Returns 0.5 when sum_t beta_t == 0.
double VoteScore(std::span<const double> betas, std::span<const int> votes);

// Same fraction without the clamp; used where the margin identity is checked.
double UnclampedVoteScore(std::span<const double> betas,
                          std::span<const int> votes);

// 1 / (1 + exp(-F)), overflow-safe.
double Sigmoid(double f);

// y F(x) / sum_t beta_t. Throws std::domain_error when sum_t beta_t == 0.
double Margin(std::span<const double> betas, std::span<const int> votes,
              int label);

// Renormalized product of per-learner estimates p_t(+1|x) = 1 - eps_t if the
// learner votes +1, eps_t otherwise. Computed in log space. Throws
// std::invalid_argument unless every 0 < eps_t < 1.
double ProductOfExpertsScore(std::span<const double> errors,
                             std::span<const int> votes);

// The exponential-loss form of the example-weight update:
//   beta = 0.5 log((1 - eps) / eps),  Z = 2 (1 - eps) / exp(beta),
//   lambda_next = lambda exp(-y beta h) / Z.
double ExponentialWeightUpdate(double lambda, double epsilon, int label,
                               int vote);

// The case-split update: lambda / (2 (1 - eps)) when the vote is correct,
// lambda / (2 eps) otherwise.
double CaseSplitWeightUpdate(double lambda, double epsilon, bool correct);

enum class BoostMode { kResampling, kReweighting };

// Naive Bayes is driven by resampling; the SGD learners by reweighting.
BoostMode DefaultBoostMode(WeakLearnerKind kind);

enum class ScoreKind { kVote, kSigmoid };

std::string_view ScoreKindName(ScoreKind kind);
ScoreKind ParseScoreKind(std::string_view name);

struct EnsembleConfig {
  int size = 10;
  WeakLearnerKind learner = WeakLearnerKind::kNaiveBayes;
  SgdParams sgd;
  BoostMode mode = BoostMode::kResampling;
};

// Online boosting. Each example passes through the learners in order
// with an example weight that grows after mistakes and shrinks after correct
// votes.
class OnlineBoostEnsemble {
 public:
  explicit OnlineBoostEnsemble(const EnsembleConfig& config);

  // One pass of one example through all learners. In resampling mode the
  // learner is trained k ~ Poisson(lambda) times; in reweighting mode once with
  // weight lambda. Draws exactly one Poisson variate per learner in resampling
  // mode and none in reweighting mode.
  void Update(const Example& example, RngStream& rng);

  // Clamped lambda_sw / (lambda_sw + lambda_sc); 0.5 for an untouched learner.
  double WeightedError(size_t t) const;
  std::vector<double> Errors() const;
  std::vector<double> Confidences() const;

  std::vector<int> Votes(std::span<const double> x) const;

  double Output(std::span<const double> x) const;
  int PredictLabel(std::span<const double> x) const {
    return Output(x) >= 0.0 ? 1 : -1;
  }
  double VoteScore(std::span<const double> x) const;
  double SigmoidScore(std::span<const double> x) const;
  double PoeScore(std::span<const double> x) const;
  double Margin(std::span<const double> x, int label) const;
  double Score(std::span<const double> x, ScoreKind kind) const;

  size_t size() const { return learners_.size(); }
  const EnsembleConfig& config() const { return config_; }
  const std::vector<WeakLearner>& learners() const { return learners_; }
  std::span<const double> lambda_correct() const { return lambda_sc_; }
  std::span<const double> lambda_wrong() const { return lambda_sw_; }

 private:
  EnsembleConfig config_;
  std::vector<WeakLearner> learners_;
  std::vector<double> lambda_sc_;
  std::vector<double> lambda_sw_;
};

}  // namespace calboost

#endif  // CALBOOST_ONLINE_BOOST_H_
