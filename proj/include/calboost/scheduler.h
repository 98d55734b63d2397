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

#ifndef CALBOOST_SCHEDULER_H_
#define CALBOOST_SCHEDULER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "calboost/bandit_policies.h"
#include "calboost/calibration.h"
#include "calboost/core_types.h"
#include "calboost/metrics.h"
#include "calboost/online_boost.h"

namespace calboost {

enum class PolicyKind { kUncalibrated, kFixed, kBandit };

// Allowed calibration periods for fixed policies.
inline constexpr int kFixedPeriods[] = {2, 4, 6, 8, 10, 12, 14};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kUncalibrated;
  int calibrate_every = 2;  // fixed policies only
  BanditPolicyKind bandit = BanditPolicyKind::kUcb1;
  double gamma = kDefaultDiscount;  // discounted bandits only

  static PolicySpec Uncalibrated() { return {}; }
  static PolicySpec Fixed(int calibrate_every);
  static PolicySpec Bandit(BanditPolicyKind kind, double gamma = kDefaultDiscount);

  // "uncalibrated", "fixed:N", or a bandit name ("ucb1", "dgts", ...).
  // Throws std::invalid_argument.
  static PolicySpec Parse(std::string_view text, double gamma = kDefaultDiscount);

  std::string Name() const;
};

// The thirteen policies compared in one experiment: uncalibrated, every fixed
// period, and the six bandit policies.
std::vector<PolicySpec> PolicyGrid(double gamma = kDefaultDiscount);

enum class RewardTiming {
  // The reward for the action of round n - 1 is 1 - L_n / L_{n-1}, where L_n is
  // the loss of the predictions made on minibatch n before any update.
  kPrequential,
  // The reward for the action of round n compares the loss on minibatch n
  // before and after the action.
  kSameBatch,
};

std::string_view RewardTimingName(RewardTiming timing);
RewardTiming ParseRewardTiming(std::string_view name);

// Bandit policies train unconditionally for this many rounds.
inline constexpr int64_t kBanditWarmupRounds = 2;

// Calibrate iff round > 1 and round is a multiple of calibrate_every.
Action FixedPolicyAction(int64_t round, int calibrate_every);

// 1 - current / previous, or 0 when previous < 1e-12. Throws
// std::invalid_argument on negative or non-finite losses.
double ComputeReward(double previous_loss, double current_loss);

struct SchedulerConfig {
  EnsembleConfig ensemble;
  ScoreKind score = ScoreKind::kVote;
  PolicySpec policy;
  RewardTiming reward_timing = RewardTiming::kPrequential;
  double clip = kDefaultClip;
};

struct RoundRecord {
  int64_t round = 0;
  Action action = Action::kTrain;
  // True when the bandit chose the action (not warmup, not a fixed rule).
  bool bandit_decision = false;
  double batch_logloss = 0.0;
  double running_logloss = 0.0;
  double batch_brier = 0.0;
  double running_brier = 0.0;
  int64_t batch_errors = 0;
  // Reward handed to the bandit this round, and the round whose action earned
  // it.
  std::optional<double> reward;
  std::optional<int64_t> rewarded_round;
  // Pre-update predictions, in minibatch order.
  std::vector<double> scores;
  std::vector<double> probabilities;
  std::vector<int> labels;
  double predict_seconds = 0.0;
  double update_seconds = 0.0;
};

// Runs the predict / evaluate / reward / act loop one minibatch at a time.
//
// Per round the random stream is consumed in this order: the policy's action
// draw (Thompson kinds only), then the ensemble's Poisson draws for each
// example in minibatch order.
class Orchestrator {
 public:
  Orchestrator(SchedulerConfig config, RngStream rng);

  // Throws std::invalid_argument when the minibatch index is not the next
  // round, or the minibatch is malformed.
  RoundRecord RunRound(const Minibatch& minibatch);

  // Calibrated (or clipped raw, for the uncalibrated policy) prediction.
  Prediction Predict(std::span<const double> x) const;

  const SchedulerConfig& config() const { return config_; }
  const OnlineBoostEnsemble& ensemble() const { return ensemble_; }
  const CalibratorState& calibrator() const { return calibrator_; }
  const std::optional<BanditState>& bandit() const { return bandit_; }
  int64_t round() const { return round_; }
  int64_t bandit_actions() const { return bandit_actions_; }
  int64_t rewards_emitted() const { return rewards_emitted_; }
  const RunningMean& running_logloss() const { return running_logloss_; }
  const RunningMean& running_brier() const { return running_brier_; }

 private:
  double BatchLogLoss(std::span<const double> probabilities,
                      std::span<const int> labels) const;
  Action ChooseAction(bool& bandit_decision);

  SchedulerConfig config_;
  RngStream rng_;
  OnlineBoostEnsemble ensemble_;
  CalibratorState calibrator_;
  std::optional<BanditState> bandit_;
  int64_t round_ = 0;
  std::optional<double> last_loss_;
  // Bandit action awaiting its reward, with the round that took it.
  std::optional<std::pair<Action, int64_t>> pending_;
  int64_t bandit_actions_ = 0;
  int64_t rewards_emitted_ = 0;
  RunningMean running_logloss_;
  RunningMean running_brier_;
};

}  // namespace calboost

#endif  // CALBOOST_SCHEDULER_H_
