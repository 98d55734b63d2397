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

#ifndef CALBOOST_BANDIT_POLICIES_H_
#define CALBOOST_BANDIT_POLICIES_H_

#include <array>
#include <cstdint>
#include <string_view>

#include "calboost/core_types.h"

namespace calboost {

enum class BanditPolicyKind {
  kUcb1,
  kUcb1Improved,
  kGts,
  kDiscountedUcb1,
  kDiscountedUcb1Improved,
  kDiscountedGts,
};

// "ucb1", "ucb1i", "gts", "ducb1", "ducb1i", "dgts".
std::string_view BanditPolicyName(BanditPolicyKind kind);
BanditPolicyKind ParseBanditPolicy(std::string_view name);

bool IsDiscounted(BanditPolicyKind kind);
bool IsThompson(BanditPolicyKind kind);

inline constexpr double kDefaultDiscount = 0.95;

struct ArmStats {
  // Discounted pull count and reward sum (plain sums when gamma == 1).
  double pulls = 0.0;
  double reward_sum = 0.0;
  // Rewards ever recorded on this arm, never discounted.
  int64_t raw_pulls = 0;
  // Gaussian posterior over the mean reward, prior N(0, 1).
  double posterior_mean = 0.0;
  double posterior_var = 1.0;

  double mean() const { return pulls > 0.0 ? reward_sum / pulls : 0.0; }
};

struct BanditState {
  BanditPolicyKind kind = BanditPolicyKind::kUcb1;
  std::array<ArmStats, kNumActions> arms;
  int64_t round = 0;  // rewards recorded so far
  double gamma = 1.0;
  double obs_variance = 1.0;
};

// Fresh state. gamma is forced to 1 for undiscounted kinds; discounted kinds
// require 0 < gamma <= 1.
BanditState MakeBanditState(BanditPolicyKind kind,
                            double gamma = kDefaultDiscount,
                            double obs_variance = 1.0);

// mean + sqrt(2 ln n / k)
double Ucb1Index(double mean, double pulls, double n);

// mean + sqrt(ln n / (2 k)); half the UCB1 padding.
double Ucb1ImprovedIndex(double mean, double pulls, double n);

// Draws one sample per arm posterior (arm order) and returns the argmax, ties
// to kTrain.
Action GtsSampleAndSelect(const BanditState& state, RngStream& rng);

// Conjugate Gaussian update of the pulled arm's posterior, plus count and sum
// bookkeeping. Non-finite rewards are skipped with a warning.
void GtsRecord(BanditState& state, Action arm, double reward);

// S += r, k += 1. Non-finite rewards are skipped with a warning.
void UcbRecord(BanditState& state, Action arm, double reward);

// Multiplies every arm's pull count and reward sum by gamma; for discounted
// Thompson sampling also inflates each posterior variance towards the prior,
// var <- min(var / gamma, 1).
void ApplyDiscount(BanditState& state);

// Discounts (discounted kinds only), then records through the policy's rule.
void RecordReward(BanditState& state, Action arm, double reward);

// UCB kinds pull a never-rewarded arm first (lowest index); otherwise the
// argmax index, ties to kTrain. The exploration count n is the total pull
// count, floored at 2 for discounted kinds. Thompson kinds sample.
Action SelectAction(const BanditState& state, RngStream& rng);

}  // namespace calboost

#endif  // CALBOOST_BANDIT_POLICIES_H_
