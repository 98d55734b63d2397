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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "calboost/harness.h"
#include "json.hpp"

namespace calboost {
namespace {

using Json = nlohmann::ordered_json;

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Json ConfigJson(const ExperimentResult& result) {
  const StreamConfig& c = result.config;
  Json policies = Json::array();
  for (const PolicySpec& p : c.policies) policies.push_back(p.Name());
  Json seeds = Json::array();
  for (int r = 0; r < c.runs; ++r) seeds.push_back(c.base_seed + static_cast<uint64_t>(r));

  Json j;
  j["source"] = result.source;
  if (c.synthetic) j["synthetic_data_seed"] = SyntheticDataSeed(c.base_seed);
  j["label_column"] =
      c.data_path ? Json(result.label_column) : Json(nullptr);
  j["positive_classes"] = result.positive_classes;
  j["stationary"] = *c.stationary;
  j["batch_size"] = *c.batch_size;
  j["ensemble_size"] = c.ensemble_size;
  j["weak_learner"] = WeakLearnerName(c.learner);
  j["boost_mode"] = DefaultBoostMode(c.learner) == BoostMode::kResampling
                        ? "resampling"
                        : "reweighting";
  j["learning_rate"] = kDefaultLearningRate;
  j["l1"] = c.l1;
  j["score"] = ScoreKindName(c.score);
  j["policies"] = policies;
  j["gamma"] = c.gamma;
  j["reward_timing"] = RewardTimingName(c.reward_timing);
  j["clip"] = kDefaultClip;
  j["runs"] = c.runs;
  j["base_seed"] = c.base_seed;
  j["run_seeds"] = seeds;
  j["reliability_bins"] = c.reliability_bins;
  j["examples"] = result.examples;
  j["rounds"] = result.rounds;
  return j;
}

Json StatJson(const RunAggregate& agg, const std::vector<double>& per_run) {
  Json j;
  j["mean"] = agg.mean.at(0);
  j["std_error"] = agg.std_error.at(0);
  j["half_width"] = agg.half_width.at(0);
  j["per_run"] = per_run;
  return j;
}

Json BinsJson(const ReliabilityBins& bins) {
  Json out = Json::array();
  const double width = 1.0 / bins.bin_count();
  for (int b = 0; b < bins.bin_count(); ++b) {
    Json j;
    j["bin"] = b;
    j["lower"] = b * width;
    j["upper"] = (b + 1) * width;
    j["count"] = bins.bin(b).count;
    j["sum_probability"] = bins.bin(b).sum_probability;
    j["positives"] = bins.bin(b).positives;
    j["mean_probability"] = bins.MeanProbability(b);
    j["empirical_frequency"] = bins.EmpiricalFrequency(b);
    out.push_back(j);
  }
  return out;
}

Json ColumnJson(const std::string& column, const PolicyResult& p) {
  Json j;
  j["column"] = column;
  j["policy"] = p.policy.Name();
  j["mean"] = p.final_logloss.mean.at(0);
  j["half_width"] = p.final_logloss.half_width.at(0);
  return j;
}

// Final log-loss in results-table layout: uncalibrated, best and worst fixed
// period, then each bandit policy. Columns with no matching policy are omitted.
Json TableColumns(const ExperimentResult& result) {
  Json columns = Json::array();
  const PolicyResult* best = nullptr;
  const PolicyResult* worst = nullptr;
  for (const PolicyResult& p : result.policies) {
    if (p.policy.kind != PolicyKind::kFixed) continue;
    const double v = p.final_logloss.mean.at(0);
    if (best == nullptr || v < best->final_logloss.mean.at(0)) best = &p;
    if (worst == nullptr || v > worst->final_logloss.mean.at(0)) worst = &p;
  }
  for (const PolicyResult& p : result.policies) {
    if (p.policy.kind == PolicyKind::kUncalibrated) {
      columns.push_back(ColumnJson("uncalibrated", p));
      break;
    }
  }
  if (best != nullptr) {
    columns.push_back(ColumnJson("best_fixed", *best));
    columns.push_back(ColumnJson("worst_fixed", *worst));
  }
  for (const PolicyResult& p : result.policies) {
    if (p.policy.kind == PolicyKind::kBandit) {
      columns.push_back(ColumnJson(p.policy.Name(), p));
    }
  }
  return columns;
}

void WriteOutputs(const ExperimentResult& result) {
  const std::filesystem::path& dir = result.config.output_dir;

  WriteFile(dir / "meta.json", ConfigJson(result).dump(2) + "\n");

  Json aggregate;
  aggregate["runs"] = result.config.runs;
  aggregate["rounds"] = result.rounds;
  aggregate["examples"] = result.examples;
  aggregate["ci_multiplier"] = kNormalCiMultiplier;
  Json policies = Json::object();
  std::string csv =
      "policy,round,running_logloss_mean,running_logloss_std_error,"
      "running_logloss_half_width\n";
  Json reliability;
  reliability["bins"] = result.config.reliability_bins;
  Json reliability_policies = Json::object();
  Json timing = Json::object();

  for (const PolicyResult& p : result.policies) {
    const std::string name = p.policy.Name();
    std::vector<double> final_ll, final_brier, calibrate, bandit, rewards,
        errors;
    double seconds = 0.0;
    for (const RunSummary& run : p.runs) {
      final_ll.push_back(run.final_logloss);
      final_brier.push_back(run.final_brier);
      calibrate.push_back(static_cast<double>(run.calibrate_rounds));
      bandit.push_back(static_cast<double>(run.bandit_actions));
      rewards.push_back(static_cast<double>(run.rewards_emitted));
      errors.push_back(static_cast<double>(run.errors) /
                       static_cast<double>(run.predictions));
      seconds += run.seconds_per_round;
    }
    Json j;
    j["running_logloss"]["mean"] = p.running_logloss.mean;
    j["running_logloss"]["std_error"] = p.running_logloss.std_error;
    j["running_logloss"]["half_width"] = p.running_logloss.half_width;
    j["final_logloss"] = StatJson(p.final_logloss, final_ll);
    j["final_brier"] = StatJson(p.final_brier, final_brier);
    j["error_rate"] = errors;
    j["calibrate_rounds"] = calibrate;
    j["bandit_actions"] = bandit;
    j["rewards_emitted"] = rewards;
    policies[name] = j;

    for (size_t i = 0; i < p.running_logloss.mean.size(); ++i) {
      Json row = Json::array({name, i + 1, p.running_logloss.mean[i],
                              p.running_logloss.std_error[i],
                              p.running_logloss.half_width[i]});
      // Reuse the JSON number formatting so CSV and JSON agree exactly.
      csv += name + "," + std::to_string(i + 1) + "," + row[2].dump() + "," +
             row[3].dump() + "," + row[4].dump() + "\n";
    }
    reliability_policies[name] = BinsJson(p.pooled_bins);
    timing[name]["mean_seconds_per_round"] =
        seconds / static_cast<double>(p.runs.size());
  }
  aggregate["policies"] = policies;
  aggregate["columns"] = TableColumns(result);
  reliability["policies"] = reliability_policies;

  WriteFile(dir / "aggregate.json", aggregate.dump(2) + "\n");
  WriteFile(dir / "aggregate.csv", csv);
  WriteFile(dir / "reliability.json", reliability.dump(2) + "\n");
  WriteFile(dir / "timing.json", timing.dump(2) + "\n");
}

struct Task {
  size_t policy;
  int run;
};

}  // namespace

uint64_t SyntheticDataSeed(uint64_t base_seed) {
  return base_seed ^ 0x9e3779b97f4a7c15ULL;
}

std::string PolicyDirName(const PolicySpec& policy) {
  std::string name = policy.Name();
  std::replace(name.begin(), name.end(), ':', '_');
  return name;
}

std::string RoundRecordJson(const RoundRecord& record, bool per_example) {
  Json j;
  j["round"] = record.round;
  j["action"] = ActionName(record.action);
  j["bandit_decision"] = record.bandit_decision;
  j["batch_size"] = record.labels.size();
  j["batch_logloss"] = record.batch_logloss;
  j["running_logloss"] = record.running_logloss;
  j["batch_brier"] = record.batch_brier;
  j["running_brier"] = record.running_brier;
  j["batch_errors"] = record.batch_errors;
  j["reward"] = record.reward ? Json(*record.reward) : Json(nullptr);
  j["rewarded_round"] =
      record.rewarded_round ? Json(*record.rewarded_round) : Json(nullptr);
  if (per_example) {
    j["probabilities"] = record.probabilities;
    j["labels"] = record.labels;
  }
  return j.dump();
}

StreamConfig ResolveConfig(StreamConfig config) {
  if (config.data_path.has_value() == config.synthetic.has_value()) {
    throw std::invalid_argument(
        "exactly one of a CSV path or a synthetic spec is required");
  }
  if (!config.stationary) {
    config.stationary = !(config.synthetic && config.synthetic->drift != 0.0);
  }
  if (!config.batch_size) {
    config.batch_size =
        *config.stationary ? kStationaryBatchSize : kNonStationaryBatchSize;
  }
  if (*config.batch_size < 1) {
    throw std::invalid_argument("batch size must be >= 1");
  }
  if (config.ensemble_size < 1) throw std::invalid_argument("T must be >= 1");
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (config.policies.empty()) throw std::invalid_argument("no policies");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  if (config.l1 < 0.0) throw std::invalid_argument("l1 must be >= 0");
  if (config.jobs < 1) config.jobs = 1;
  for (PolicySpec& p : config.policies) p.gamma = config.gamma;
  return config;
}

ExperimentResult RunExperiment(const StreamConfig& raw_config) {
  ExperimentResult result;
  result.config = ResolveConfig(raw_config);
  const StreamConfig& config = result.config;

  std::vector<Example> examples;
  if (config.data_path) {
    LabelledData data = LoadCsv(*config.data_path, config.csv);
    examples = std::move(data.examples);
    result.positive_classes = data.positive_classes;
    result.label_column = data.label_column;
    result.source = "csv:" + config.data_path->string();
  } else {
    RngStream data_rng(SyntheticDataSeed(config.base_seed));
    examples = GenerateSynthetic(*config.synthetic, *config.batch_size, data_rng);
    result.positive_classes = {"+1"};
    result.source = "synthetic:" + config.synthetic->ToString();
  }
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  result.examples = static_cast<int64_t>(examples.size());
  const int b = *config.batch_size;
  result.rounds = (result.examples + b - 1) / b;

  const bool write = !config.output_dir.empty();
  if (write) {
    std::filesystem::create_directories(config.output_dir);
    for (const PolicySpec& p : config.policies) {
      std::filesystem::create_directories(config.output_dir / PolicyDirName(p));
    }
  }

  result.policies.resize(config.policies.size());
  for (size_t i = 0; i < config.policies.size(); ++i) {
    result.policies[i].policy = config.policies[i];
    result.policies[i].runs.resize(static_cast<size_t>(config.runs));
  }

  EnsembleConfig ensemble;
  ensemble.size = config.ensemble_size;
  ensemble.learner = config.learner;
  ensemble.sgd.l1 = config.l1;
  ensemble.mode = DefaultBoostMode(config.learner);

  const auto run_one = [&](const Task& task) {
    const PolicySpec& policy = config.policies[task.policy];
    RngStream rng(config.base_seed + static_cast<uint64_t>(task.run));
    std::vector<Minibatch> stream =
        MakeStream(examples, b, *config.stationary, rng);

    SchedulerConfig sc;
    sc.ensemble = ensemble;
    sc.score = config.score;
    sc.policy = policy;
    sc.reward_timing = config.reward_timing;
    Orchestrator orchestrator(sc, std::move(rng));

    RunSummary summary;
    summary.bins = ReliabilityBins(config.reliability_bins);
    std::ofstream out;
    const std::filesystem::path path =
        config.output_dir / PolicyDirName(policy) /
        ("run_" + std::to_string(task.run) + ".jsonl");
    if (write) {
      out.open(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + path.string());
    }
    double seconds = 0.0;
    for (const Minibatch& mb : stream) {
      const RoundRecord record = orchestrator.RunRound(mb);
      summary.running_logloss.push_back(record.running_logloss);
      summary.actions.push_back(record.action);
      if (record.action == Action::kCalibrate) ++summary.calibrate_rounds;
      summary.errors += record.batch_errors;
      for (size_t i = 0; i < record.labels.size(); ++i) {
        summary.bins.Add(record.probabilities[i], record.labels[i]);
      }
      seconds += record.predict_seconds + record.update_seconds;
      if (write) out << RoundRecordJson(record, config.per_example) << '\n';
    }
    if (write && !out) throw std::runtime_error("write failed: " + path.string());
    summary.final_logloss = orchestrator.running_logloss().mean();
    summary.logloss_total = orchestrator.running_logloss().total();
    summary.predictions = orchestrator.running_logloss().count();
    summary.final_brier = orchestrator.running_brier().mean();
    summary.bandit_actions = orchestrator.bandit_actions();
    summary.rewards_emitted = orchestrator.rewards_emitted();
    summary.seconds_per_round = seconds / static_cast<double>(stream.size());
    result.policies[task.policy].runs[static_cast<size_t>(task.run)] =
        std::move(summary);
  };

  std::vector<Task> tasks;
  for (size_t p = 0; p < config.policies.size(); ++p) {
    for (int r = 0; r < config.runs; ++r) tasks.push_back({p, r});
  }
  if (config.jobs <= 1) {
    for (const Task& task : tasks) run_one(task);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    const size_t n_workers =
        std::min(tasks.size(), static_cast<size_t>(config.jobs));
    for (size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (size_t i = next++; i < tasks.size(); i = next++) {
          try {
            run_one(tasks[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (PolicyResult& p : result.policies) {
    std::vector<std::vector<double>> curves, finals, briers;
    p.pooled_bins = ReliabilityBins(config.reliability_bins);
    for (const RunSummary& run : p.runs) {
      curves.push_back(run.running_logloss);
      finals.push_back({run.final_logloss});
      briers.push_back({run.final_brier});
      p.pooled_bins.Merge(run.bins);
    }
    p.running_logloss = AggregateRuns(curves);
    p.final_logloss = AggregateRuns(finals);
    p.final_brier = AggregateRuns(briers);
  }

  if (write) WriteOutputs(result);
  return result;
}

}  // namespace calboost
