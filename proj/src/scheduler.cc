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

#include "calboost/scheduler.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace calboost {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

bool IsFixedPeriod(int n) {
  return std::find(std::begin(kFixedPeriods), std::end(kFixedPeriods), n) !=
         std::end(kFixedPeriods);
}

}  // namespace

PolicySpec PolicySpec::Fixed(int calibrate_every) {
  if (!IsFixedPeriod(calibrate_every)) {
    throw std::invalid_argument("fixed calibration period must be one of "
                                "2, 4, 6, 8, 10, 12, 14; got " +
                                std::to_string(calibrate_every));
  }
  PolicySpec spec;
  spec.kind = PolicyKind::kFixed;
  spec.calibrate_every = calibrate_every;
  return spec;
}

PolicySpec PolicySpec::Bandit(BanditPolicyKind kind, double gamma) {
  PolicySpec spec;
  spec.kind = PolicyKind::kBandit;
  spec.bandit = kind;
  spec.gamma = gamma;
  return spec;
}

PolicySpec PolicySpec::Parse(std::string_view text, double gamma) {
  if (text == "uncalibrated") return Uncalibrated();
  constexpr std::string_view kFixedPrefix = "fixed:";
  if (text.starts_with(kFixedPrefix)) {
    const std::string digits(text.substr(kFixedPrefix.size()));
    size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != digits.size()) {
      throw std::invalid_argument("bad fixed policy: " + std::string(text));
    }
    return Fixed(n);
  }
  return Bandit(ParseBanditPolicy(text), gamma);
}

std::string PolicySpec::Name() const {
  switch (kind) {
    case PolicyKind::kUncalibrated:
      return "uncalibrated";
    case PolicyKind::kFixed:
      return "fixed:" + std::to_string(calibrate_every);
    case PolicyKind::kBandit:
      return std::string(BanditPolicyName(bandit));
  }
  return "unknown";
}

std::vector<PolicySpec> PolicyGrid(double gamma) {
  std::vector<PolicySpec> grid = {PolicySpec::Uncalibrated()};
  for (int n : kFixedPeriods) grid.push_back(PolicySpec::Fixed(n));
  for (BanditPolicyKind kind :
       {BanditPolicyKind::kUcb1, BanditPolicyKind::kUcb1Improved,
        BanditPolicyKind::kGts, BanditPolicyKind::kDiscountedUcb1,
        BanditPolicyKind::kDiscountedUcb1Improved,
        BanditPolicyKind::kDiscountedGts}) {
    grid.push_back(PolicySpec::Bandit(kind, gamma));
  }
  return grid;
}

std::string_view RewardTimingName(RewardTiming timing) {
  return timing == RewardTiming::kPrequential ? "prequential" : "same_batch";
}

RewardTiming ParseRewardTiming(std::string_view name) {
  if (name == "prequential") return RewardTiming::kPrequential;
  if (name == "same_batch") return RewardTiming::kSameBatch;
  throw std::invalid_argument("unknown reward timing: " + std::string(name));
}

Action FixedPolicyAction(int64_t round, int calibrate_every) {
  if (round < 1 || calibrate_every < 2) {
    throw std::invalid_argument("fixed policy needs round >= 1, period >= 2");
  }
  return round > 1 && round % calibrate_every == 0 ? Action::kCalibrate
                                                   : Action::kTrain;
}

double ComputeReward(double previous_loss, double current_loss) {
  if (!(previous_loss >= 0.0) || !(current_loss >= 0.0) ||
      !std::isfinite(previous_loss) || !std::isfinite(current_loss)) {
    throw std::invalid_argument("losses must be finite and non-negative");
  }
  if (previous_loss < 1e-12) return 0.0;
  return 1.0 - current_loss / previous_loss;
}

Orchestrator::Orchestrator(SchedulerConfig config, RngStream rng)
    : config_(std::move(config)),
      rng_(std::move(rng)),
      ensemble_(config_.ensemble) {
  if (config_.policy.kind == PolicyKind::kFixed &&
      !IsFixedPeriod(config_.policy.calibrate_every)) {
    throw std::invalid_argument("invalid fixed calibration period");
  }
  if (config_.policy.kind == PolicyKind::kBandit) {
    bandit_ = MakeBanditState(config_.policy.bandit, config_.policy.gamma);
  }
}

Prediction Orchestrator::Predict(std::span<const double> x) const {
  const std::vector<double> betas = ensemble_.Confidences();
  const std::vector<int> votes = ensemble_.Votes(x);
  const double f = EnsembleOutput(betas, votes);
  Prediction out;
  out.score = config_.score == ScoreKind::kVote ? VoteScore(betas, votes)
                                                : Sigmoid(f);
  const double p = config_.policy.kind == PolicyKind::kUncalibrated
                       ? out.score
                       : CalibrateScore(calibrator_, out.score);
  out.probability = ClipProbability(p, config_.clip);
  out.predicted_label = f >= 0.0 ? 1 : -1;
  return out;
}

double Orchestrator::BatchLogLoss(std::span<const double> probabilities,
                                  std::span<const int> labels) const {
  double total = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    total += LogLoss(probabilities[i], labels[i], config_.clip);
  }
  return total / static_cast<double>(labels.size());
}

Action Orchestrator::ChooseAction(bool& bandit_decision) {
  bandit_decision = false;
  switch (config_.policy.kind) {
    case PolicyKind::kUncalibrated:
      return Action::kTrain;
    case PolicyKind::kFixed:
      return FixedPolicyAction(round_, config_.policy.calibrate_every);
    case PolicyKind::kBandit:
      if (round_ <= kBanditWarmupRounds) return Action::kTrain;
      bandit_decision = true;
      return SelectAction(*bandit_, rng_);
  }
  return Action::kTrain;
}

RoundRecord Orchestrator::RunRound(const Minibatch& minibatch) {
  if (minibatch.index != round_ + 1) {
    throw std::invalid_argument("minibatch " + std::to_string(minibatch.index) +
                                " arrived in round " +
                                std::to_string(round_ + 1));
  }
  ValidateMinibatch(minibatch);
  ++round_;

  RoundRecord record;
  record.round = round_;
  const size_t size = minibatch.examples.size();
  record.scores.resize(size);
  record.probabilities.resize(size);
  record.labels.resize(size);

  // Predict before any label is used.
  const auto predict_start = std::chrono::steady_clock::now();
  double brier_total = 0.0;
  std::vector<double> losses(size);
  for (size_t i = 0; i < size; ++i) {
    const Example& example = minibatch.examples[i];
    const Prediction prediction = Predict(example.features);
    record.scores[i] = prediction.score;
    record.probabilities[i] = prediction.probability;
    record.labels[i] = example.label;
    losses[i] = LogLoss(prediction.probability, example.label, config_.clip);
    brier_total += BrierScore(prediction.probability, example.label);
    if (prediction.predicted_label != example.label) ++record.batch_errors;
  }
  record.predict_seconds = SecondsSince(predict_start);

  double loss_sum = 0.0;
  for (double l : losses) loss_sum += l;
  const double batch_loss = loss_sum / static_cast<double>(size);
  record.batch_logloss = batch_loss;
  record.batch_brier = brier_total / static_cast<double>(size);
  running_logloss_.Add(losses);
  for (size_t i = 0; i < size; ++i) {
    running_brier_.Add(BrierScore(record.probabilities[i], record.labels[i]));
  }
  record.running_logloss = running_logloss_.mean();
  record.running_brier = running_brier_.mean();

  if (pending_ && last_loss_) {
    const double reward = ComputeReward(*last_loss_, batch_loss);
    RecordReward(*bandit_, pending_->first, reward);
    record.reward = reward;
    record.rewarded_round = pending_->second;
    ++rewards_emitted_;
    pending_.reset();
  }

  const auto update_start = std::chrono::steady_clock::now();
  record.action = ChooseAction(record.bandit_decision);
  if (record.bandit_decision) ++bandit_actions_;

  if (record.action == Action::kTrain) {
    for (const Example& example : minibatch.examples) {
      ensemble_.Update(example, rng_);
    }
  } else {
    UpdateCalibrator(calibrator_, record.scores, record.labels);
  }

  if (record.bandit_decision) {
    if (config_.reward_timing == RewardTiming::kSameBatch) {
      std::vector<double> after(size);
      for (size_t i = 0; i < size; ++i) {
        after[i] = Predict(minibatch.examples[i].features).probability;
      }
      const double reward =
          ComputeReward(batch_loss, BatchLogLoss(after, record.labels));
      RecordReward(*bandit_, record.action, reward);
      record.reward = reward;
      record.rewarded_round = round_;
      ++rewards_emitted_;
    } else {
      pending_ = std::make_pair(record.action, round_);
    }
  }

  UpdateCounts(calibrator_, record.labels);
  last_loss_ = batch_loss;
  record.update_seconds = SecondsSince(update_start);
  return record;
}

}  // namespace calboost
