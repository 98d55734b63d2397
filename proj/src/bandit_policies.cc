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

#include "calboost/bandit_policies.h"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace calboost {
namespace {

constexpr BanditPolicyKind kAllKinds[] = {
    BanditPolicyKind::kUcb1,           BanditPolicyKind::kUcb1Improved,
    BanditPolicyKind::kGts,            BanditPolicyKind::kDiscountedUcb1,
    BanditPolicyKind::kDiscountedUcb1Improved, BanditPolicyKind::kDiscountedGts,
};

bool AcceptReward(double reward) {
  if (std::isfinite(reward)) return true;
  std::clog << "warning: skipping non-finite bandit reward\n";
  return false;
}

ArmStats& Arm(BanditState& state, Action arm) {
  return state.arms[static_cast<size_t>(arm)];
}

}  // namespace

std::string_view BanditPolicyName(BanditPolicyKind kind) {
  switch (kind) {
    case BanditPolicyKind::kUcb1:
      return "ucb1";
    case BanditPolicyKind::kUcb1Improved:
      return "ucb1i";
    case BanditPolicyKind::kGts:
      return "gts";
    case BanditPolicyKind::kDiscountedUcb1:
      return "ducb1";
    case BanditPolicyKind::kDiscountedUcb1Improved:
      return "ducb1i";
    case BanditPolicyKind::kDiscountedGts:
      return "dgts";
  }
  return "unknown";
}

BanditPolicyKind ParseBanditPolicy(std::string_view name) {
  for (BanditPolicyKind kind : kAllKinds) {
    if (name == BanditPolicyName(kind)) return kind;
  }
  throw std::invalid_argument("unknown bandit policy: " + std::string(name));
}

bool IsDiscounted(BanditPolicyKind kind) {
  return kind == BanditPolicyKind::kDiscountedUcb1 ||
         kind == BanditPolicyKind::kDiscountedUcb1Improved ||
         kind == BanditPolicyKind::kDiscountedGts;
}

bool IsThompson(BanditPolicyKind kind) {
  return kind == BanditPolicyKind::kGts ||
         kind == BanditPolicyKind::kDiscountedGts;
}

BanditState MakeBanditState(BanditPolicyKind kind, double gamma,
                            double obs_variance) {
  if (!(obs_variance > 0.0)) {
    throw std::invalid_argument("observation variance must be > 0");
  }
  BanditState state;
  state.kind = kind;
  state.obs_variance = obs_variance;
  if (IsDiscounted(kind)) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw std::invalid_argument("discount must lie in (0, 1]");
    }
    state.gamma = gamma;
  }
  return state;
}

double Ucb1Index(double mean, double pulls, double n) {
  if (!(pulls > 0.0)) throw std::invalid_argument("UCB index needs pulls > 0");
  return mean + std::sqrt(2.0 * std::log(n) / pulls);
}

double Ucb1ImprovedIndex(double mean, double pulls, double n) {
  if (!(pulls > 0.0)) throw std::invalid_argument("UCB index needs pulls > 0");
  return mean + std::sqrt(std::log(n) / (2.0 * pulls));
}

Action GtsSampleAndSelect(const BanditState& state, RngStream& rng) {
  double best = 0.0;
  Action choice = Action::kTrain;
  for (int a = 0; a < kNumActions; ++a) {
    const ArmStats& arm = state.arms[static_cast<size_t>(a)];
    const double theta =
        SampleGaussian(arm.posterior_mean, arm.posterior_var, rng);
    if (a == 0 || theta > best) {
      best = theta;
      choice = static_cast<Action>(a);
    }
  }
  return choice;
}

void GtsRecord(BanditState& state, Action arm, double reward) {
  if (!AcceptReward(reward)) return;
  ArmStats& s = Arm(state, arm);
  const double prior_var = s.posterior_var;
  const double obs_var = state.obs_variance;
  s.posterior_mean =
      (s.posterior_mean * obs_var + reward * prior_var) / (obs_var + prior_var);
  s.posterior_var = prior_var * obs_var / (prior_var + obs_var);
  s.reward_sum += reward;
  s.pulls += 1.0;
  ++s.raw_pulls;
  ++state.round;
}

void UcbRecord(BanditState& state, Action arm, double reward) {
  if (!AcceptReward(reward)) return;
  ArmStats& s = Arm(state, arm);
  s.reward_sum += reward;
  s.pulls += 1.0;
  ++s.raw_pulls;
  ++state.round;
}

void ApplyDiscount(BanditState& state) {
  const bool thompson = IsThompson(state.kind);
  for (ArmStats& arm : state.arms) {
    arm.reward_sum *= state.gamma;
    arm.pulls *= state.gamma;
    if (thompson) arm.posterior_var = std::min(arm.posterior_var / state.gamma, 1.0);
  }
}

void RecordReward(BanditState& state, Action arm, double reward) {
  if (!std::isfinite(reward)) {
    AcceptReward(reward);
    return;
  }
  if (IsDiscounted(state.kind)) ApplyDiscount(state);
  if (IsThompson(state.kind)) {
    GtsRecord(state, arm, reward);
  } else {
    UcbRecord(state, arm, reward);
  }
}

Action SelectAction(const BanditState& state, RngStream& rng) {
  if (IsThompson(state.kind)) return GtsSampleAndSelect(state, rng);

  // A discounted count can underflow to zero after a very long absence; such
  // an arm is treated like an unpulled one.
  for (int a = 0; a < kNumActions; ++a) {
    const ArmStats& arm = state.arms[static_cast<size_t>(a)];
    if (arm.raw_pulls == 0 || !(arm.pulls > 0.0)) {
      return static_cast<Action>(a);
    }
  }
  double n = 0.0;
  for (const ArmStats& arm : state.arms) n += arm.pulls;
  if (IsDiscounted(state.kind)) n = std::max(n, 2.0);

  const bool improved = state.kind == BanditPolicyKind::kUcb1Improved ||
                        state.kind == BanditPolicyKind::kDiscountedUcb1Improved;
  double best = 0.0;
  Action choice = Action::kTrain;
  for (int a = 0; a < kNumActions; ++a) {
    const ArmStats& arm = state.arms[static_cast<size_t>(a)];
    const double index = improved ? Ucb1ImprovedIndex(arm.mean(), arm.pulls, n)
                                  : Ucb1Index(arm.mean(), arm.pulls, n);
    if (a == 0 || index > best) {
      best = index;
      choice = static_cast<Action>(a);
    }
  }
  return choice;
}

}  // namespace calboost
