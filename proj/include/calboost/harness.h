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

#ifndef CALBOOST_HARNESS_H_
#define CALBOOST_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "calboost/core_types.h"
#include "calboost/metrics.h"
#include "calboost/scheduler.h"

namespace calboost {

// Malformed input data (as opposed to a bad configuration, which raises
// std::invalid_argument).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- Data ingestion ----------------------------------------------------------

struct CsvOptions {
  // Empty selects the last column.
  std::string label_column;
  // Raw label values mapped to +1; everything else is -1. Empty selects the
  // most frequent value (ties to the lexicographically smallest).
  std::vector<std::string> positive_classes;
};

struct LabelledData {
  std::vector<Example> examples;
  std::vector<std::string> feature_names;
  std::string label_column;
  std::vector<std::string> positive_classes;
  std::map<std::string, int64_t> class_counts;
};

// Headered CSV with numeric features. Throws ParseError (with the 1-based line
// number) on a missing header or non-numeric feature, std::invalid_argument
// on an unknown label column or a positive class that never occurs.
LabelledData ParseCsv(std::istream& in, const CsvOptions& options);
LabelledData LoadCsv(const std::filesystem::path& path,
                     const CsvOptions& options);

// Two spherical unit-variance Gaussian classes in `dims` dimensions with means
// +-(delta / 2) in every coordinate. With drift, example i has both means
// shifted by drift * (i / block_size) in every coordinate.
struct SyntheticSpec {
  int64_t n_examples = 5000;
  int dims = 5;
  double delta = 2.0;
  double drift = 0.0;

  // "n=5000,d=5,delta=2[,drift=0.01]"; omitted keys keep their defaults.
  static SyntheticSpec Parse(std::string_view text);
  std::string ToString() const;
};

// Exactly floor(n/2) positives, in random order. Draw order: the label
// permutation, then `dims` Gaussian draws per example.
std::vector<Example> GenerateSynthetic(const SyntheticSpec& spec,
                                       int block_size, RngStream& rng);

// Shuffles (stationary streams only) and cuts into ceil(N / b) minibatches
// numbered from 1; the last may be short. Throws std::invalid_argument on an
// empty dataset or batch_size < 1.
std::vector<Minibatch> MakeStream(std::vector<Example> examples, int batch_size,
                                  bool stationary, RngStream& rng);

// -- Experiments -------------------------------------------------------------

inline constexpr int kStationaryBatchSize = 50;
inline constexpr int kNonStationaryBatchSize = 100;

struct StreamConfig {
  std::optional<std::filesystem::path> data_path;
  std::optional<SyntheticSpec> synthetic;
  CsvOptions csv;
  // Defaults: CSV streams are stationary, synthetic streams are stationary
  // unless they drift.
  std::optional<bool> stationary;
  // Defaults to kStationaryBatchSize or kNonStationaryBatchSize.
  std::optional<int> batch_size;
  int ensemble_size = 10;
  WeakLearnerKind learner = WeakLearnerKind::kNaiveBayes;
  double l1 = 0.0;
  ScoreKind score = ScoreKind::kVote;
  std::vector<PolicySpec> policies = {PolicySpec::Uncalibrated()};
  int runs = 10;
  uint64_t base_seed = 1;
  double gamma = kDefaultDiscount;
  RewardTiming reward_timing = RewardTiming::kPrequential;
  int reliability_bins = kDefaultReliabilityBins;
  // Write per-example probabilities and labels into the round records.
  bool per_example = false;
  int jobs = 1;
  // Empty: nothing is written.
  std::filesystem::path output_dir;
};

// Seed of the synthetic data set; runs use base_seed + run.
uint64_t SyntheticDataSeed(uint64_t base_seed);

struct RunSummary {
  std::vector<double> running_logloss;  // per round
  std::vector<Action> actions;
  double final_logloss = 0.0;
  double final_brier = 0.0;
  double logloss_total = 0.0;
  int64_t predictions = 0;
  int64_t errors = 0;
  int64_t calibrate_rounds = 0;
  int64_t bandit_actions = 0;
  int64_t rewards_emitted = 0;
  double seconds_per_round = 0.0;
  ReliabilityBins bins;
};

struct PolicyResult {
  PolicySpec policy;
  std::vector<RunSummary> runs;
  RunAggregate running_logloss;
  RunAggregate final_logloss;  // single index
  RunAggregate final_brier;    // single index
  ReliabilityBins pooled_bins;
};

struct ExperimentResult {
  StreamConfig config;  // with defaults resolved
  std::string source;
  std::string label_column;  // CSV sources only
  std::vector<std::string> positive_classes;
  int64_t examples = 0;
  int64_t rounds = 0;
  std::vector<PolicyResult> policies;
};

// Resolves defaults and validates. Throws std::invalid_argument.
StreamConfig ResolveConfig(StreamConfig config);

// Runs every (policy, run) pair. Run r of every policy sees the same stream.
// When output_dir is set, writes:
//   meta.json, aggregate.json, aggregate.csv, reliability.json, timing.json
//   <policy>/run_<r>.jsonl   one round record per line
// Every file except timing.json is a deterministic function of the config.
ExperimentResult RunExperiment(const StreamConfig& config);

// Directory name for a policy ("fixed:4" -> "fixed_4").
std::string PolicyDirName(const PolicySpec& policy);

// One JSON line (no trailing newline) in the fixed round-record field order.
std::string RoundRecordJson(const RoundRecord& record, bool per_example);

}  // namespace calboost

#endif  // CALBOOST_HARNESS_H_
