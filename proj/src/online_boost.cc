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

#include "calboost/online_boost.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace calboost {

double ClampError(double epsilon) {
  if (epsilon < kErrorClamp) return kErrorClamp;
  if (epsilon > 1.0 - kErrorClamp) return 1.0 - kErrorClamp;
  return epsilon;
}

double Confidence(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("weighted error must lie in (0, 1)");
  }
  return std::log((1.0 - epsilon) / epsilon);
}

double EnsembleOutput(std::span<const double> betas,
                      std::span<const int> votes) {
  double f = 0.0;
  for (size_t t = 0; t < betas.size(); ++t) f += betas[t] * votes[t];
  return f;
}

double UnclampedVoteScore(std::span<const double> betas,
                          std::span<const int> votes) {
  double positive = 0.0;
  double total = 0.0;
  for (size_t t = 0; t < betas.size(); ++t) {
    total += betas[t];
    if (votes[t] == 1) positive += betas[t];
  }
  if (total == 0.0) return 0.5;
  return positive / total;
}

double VoteScore(std::span<const double> betas, std::span<const int> votes) {
  const double s = UnclampedVoteScore(betas, votes);
  if (s < 0.0) return 0.0;
  if (s > 1.0) return 1.0;
  return s;
}

double Sigmoid(double f) {
  // Kept strictly inside (0, 1) even when exp under- or overflows.
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  double s;
  if (f >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-f));
  } else {
    const double e = std::exp(f);
    s = e / (1.0 + e);
  }
  if (s < kLow) return kLow;
  if (s > kHigh) return kHigh;
  return s;
}

double Margin(std::span<const double> betas, std::span<const int> votes,
              int label) {
  double total = 0.0;
  for (double b : betas) total += b;
  if (total == 0.0) {
    throw std::domain_error("margin undefined: confidences sum to zero");
  }
  return label * EnsembleOutput(betas, votes) / total;
}

double ProductOfExpertsScore(std::span<const double> errors,
                             std::span<const int> votes) {
  double log_pos = 0.0;
  double log_neg = 0.0;
  for (size_t t = 0; t < errors.size(); ++t) {
    const double eps = errors[t];
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::invalid_argument("expert error must lie in (0, 1)");
    }
    if (votes[t] == 1) {
      log_pos += std::log(1.0 - eps);
      log_neg += std::log(eps);
    } else {
      log_pos += std::log(eps);
      log_neg += std::log(1.0 - eps);
    }
  }
  return Sigmoid(log_pos - log_neg);
}

double ExponentialWeightUpdate(double lambda, double epsilon, int label,
                               int vote) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("weighted error must lie in (0, 1)");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  const double beta = 0.5 * std::log((1.0 - epsilon) / epsilon);
  const double z = 2.0 * (1.0 - epsilon) / std::exp(beta);
  return lambda * std::exp(-label * beta * vote) / z;
}

double CaseSplitWeightUpdate(double lambda, double epsilon, bool correct) {
  return correct ? lambda / (2.0 * (1.0 - epsilon)) : lambda / (2.0 * epsilon);
}

BoostMode DefaultBoostMode(WeakLearnerKind kind) {
  return kind == WeakLearnerKind::kNaiveBayes ? BoostMode::kResampling
                                              : BoostMode::kReweighting;
}

std::string_view ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kVote ? "vote" : "sigmoid";
}

ScoreKind ParseScoreKind(std::string_view name) {
  if (name == "vote") return ScoreKind::kVote;
  if (name == "sigmoid") return ScoreKind::kSigmoid;
  throw std::invalid_argument("unknown score kind: " + std::string(name));
}

OnlineBoostEnsemble::OnlineBoostEnsemble(const EnsembleConfig& config)
    : config_(config),
      lambda_sc_(static_cast<size_t>(config.size), 0.0),
      lambda_sw_(static_cast<size_t>(config.size), 0.0) {
  if (config.size < 1) throw std::invalid_argument("ensemble size must be >= 1");
  learners_.reserve(static_cast<size_t>(config.size));
  for (int t = 0; t < config.size; ++t) {
    learners_.push_back(WeakLearner::Make(config.learner, config.sgd));
  }
}

void OnlineBoostEnsemble::Update(const Example& example, RngStream& rng) {
  const std::span<const double> x = example.features;
  const int y = example.label;
  double lambda = 1.0;
  for (size_t t = 0; t < learners_.size(); ++t) {
    WeakLearner& learner = learners_[t];
    if (config_.mode == BoostMode::kResampling) {
      const int k = SamplePoisson(lambda, rng);
      for (int i = 0; i < k; ++i) learner.Update(x, y, 1.0);
    } else {
      learner.Update(x, y, lambda);
    }
    const bool correct = learner.Predict(x) == y;
    if (correct) {
      lambda_sc_[t] += lambda;
    } else {
      lambda_sw_[t] += lambda;
    }
    lambda = CaseSplitWeightUpdate(lambda, WeightedError(t), correct);
  }
}

double OnlineBoostEnsemble::WeightedError(size_t t) const {
  const double total = lambda_sw_[t] + lambda_sc_[t];
  if (total <= 0.0) return 0.5;
  return ClampError(lambda_sw_[t] / total);
}

std::vector<double> OnlineBoostEnsemble::Errors() const {
  std::vector<double> errors(learners_.size());
  for (size_t t = 0; t < learners_.size(); ++t) errors[t] = WeightedError(t);
  return errors;
}

std::vector<double> OnlineBoostEnsemble::Confidences() const {
  std::vector<double> betas(learners_.size());
  for (size_t t = 0; t < learners_.size(); ++t) {
    betas[t] = Confidence(WeightedError(t));
  }
  return betas;
}

std::vector<int> OnlineBoostEnsemble::Votes(std::span<const double> x) const {
  std::vector<int> votes(learners_.size());
  for (size_t t = 0; t < learners_.size(); ++t) votes[t] = learners_[t].Predict(x);
  return votes;
}

double OnlineBoostEnsemble::Output(std::span<const double> x) const {
  return EnsembleOutput(Confidences(), Votes(x));
}

double OnlineBoostEnsemble::VoteScore(std::span<const double> x) const {
  return calboost::VoteScore(Confidences(), Votes(x));
}

double OnlineBoostEnsemble::SigmoidScore(std::span<const double> x) const {
  return Sigmoid(Output(x));
}

double OnlineBoostEnsemble::PoeScore(std::span<const double> x) const {
  return ProductOfExpertsScore(Errors(), Votes(x));
}

double OnlineBoostEnsemble::Margin(std::span<const double> x, int label) const {
  return calboost::Margin(Confidences(), Votes(x), label);
}

double OnlineBoostEnsemble::Score(std::span<const double> x,
                                  ScoreKind kind) const {
  return kind == ScoreKind::kVote ? VoteScore(x) : SigmoidScore(x);
}

}  // namespace calboost
