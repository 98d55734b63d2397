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

// Command-line front end: runs a prequential experiment and writes the
// round records and aggregates to --out.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calboost/harness.h"
#include "calboost/simd/kernels.h"

namespace {

using calboost::PolicySpec;

std::vector<PolicySpec> ParsePolicies(const std::vector<std::string>& names,
                                      double gamma) {
  std::vector<PolicySpec> out;
  for (const std::string& name : names) {
    if (name == "grid") {
      for (const PolicySpec& p : calboost::PolicyGrid(gamma)) out.push_back(p);
    } else {
      out.push_back(PolicySpec::Parse(name, gamma));
    }
  }
  return out;
}

void PrintSummary(const calboost::ExperimentResult& result) {
  std::cout << "source " << result.source << ", " << result.examples
            << " examples, " << result.rounds << " rounds, "
            << result.config.runs << " runs\n";
  for (const calboost::PolicyResult& p : result.policies) {
    std::cout << "  " << p.policy.Name() << "  final log-loss "
              << p.final_logloss.mean.at(0) << " +- "
              << p.final_logloss.half_width.at(0) << "  brier "
              << p.final_brier.mean.at(0) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming boosting with bandit-scheduled calibration"};

  std::string data;
  std::string synthetic;
  std::string label_col;
  std::vector<std::string> positive_classes;
  std::vector<std::string> policies = {"uncalibrated"};
  std::string weak_learner = "nb";
  int ensemble_size = 10;
  std::optional<int> batch_size;
  double l1 = 0.0;
  std::string score = "vote";
  double gamma = calboost::kDefaultDiscount;
  std::string reward_timing = "prequential";
  int runs = 10;
  uint64_t seed = 1;
  std::optional<bool> stationary;
  std::string out;
  int jobs = 1;
  bool per_example = false;
  int bins = calboost::kDefaultReliabilityBins;

  auto* data_opt = app.add_option("--data", data, "Headered CSV file");
  auto* synth_opt = app.add_option(
      "--synthetic", synthetic, "Synthetic stream, e.g. n=5000,d=5,delta=2");
  data_opt->excludes(synth_opt);
  app.add_option("--label-col", label_col, "Label column (default: last)");
  app.add_option("--positive-classes", positive_classes,
                 "Raw label values mapped to +1 (default: most frequent)")
      ->delimiter(',');
  app.add_option("--policy", policies,
                 "uncalibrated, fixed:N, ucb1, ucb1i, gts, ducb1, ducb1i, "
                 "dgts or grid; comma-separated")
      ->delimiter(',');
  app.add_option("--weak-learner", weak_learner, "nb, logreg, svm or perceptron");
  app.add_option("--T", ensemble_size, "Ensemble size");
  app.add_option("--batch-size", batch_size, "Minibatch size");
  app.add_option("--l1", l1, "L1 strength for SGD learners");
  app.add_option("--score", score, "vote or sigmoid");
  app.add_option("--gamma", gamma, "Discount for discounted bandits");
  app.add_option("--reward-timing", reward_timing, "prequential or same_batch");
  app.add_option("--runs", runs, "Independent runs");
  app.add_option("--seed", seed, "Base seed; run r uses seed + r");
  app.add_option("--stationary", stationary, "Shuffle each run (true/false)");
  app.add_option("--out", out, "Output directory");
  app.add_option("--jobs", jobs, "Parallel runs");
  app.add_flag("--per-example", per_example,
               "Include per-example probabilities in round records");
  app.add_option("--bins", bins, "Reliability bins");
  app.add_flag("--print-kernels", [&](int64_t) {
    std::cout << calboost::simd::KernelLevelName(
                     calboost::simd::ActiveKernels().level)
              << "\n";
    std::exit(0);
  }, "Print the active SIMD kernel variant and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    calboost::StreamConfig config;
    if (!data.empty()) {
      config.data_path = data;
    } else if (!synthetic.empty()) {
      config.synthetic = calboost::SyntheticSpec::Parse(synthetic);
    } else {
      std::cerr << "error: one of --data or --synthetic is required\n";
      return 2;
    }
    config.csv.label_column = label_col;
    config.csv.positive_classes = positive_classes;
    config.stationary = stationary;
    config.batch_size = batch_size;
    config.ensemble_size = ensemble_size;
    config.learner = calboost::ParseWeakLearner(weak_learner);
    config.l1 = l1;
    config.score = calboost::ParseScoreKind(score);
    config.policies = ParsePolicies(policies, gamma);
    config.runs = runs;
    config.base_seed = seed;
    config.gamma = gamma;
    config.reward_timing = calboost::ParseRewardTiming(reward_timing);
    config.reliability_bins = bins;
    config.per_example = per_example;
    config.jobs = jobs;
    config.output_dir = out;

    const calboost::ExperimentResult result = calboost::RunExperiment(config);
    PrintSummary(result);
  } catch (const calboost::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
