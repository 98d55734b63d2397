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

#ifndef CALBOOST_METRICS_H_
#define CALBOOST_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace calboost {

// Probabilities are clipped to [clip, 1 - clip] before the log-loss; with the
// default the per-example loss is at most -ln(1e-7) ~= 16.118.
inline constexpr double kDefaultClip = 1e-7;

double ClipProbability(double p, double clip = kDefaultClip);

// -ln p for label +1, -ln(1 - p) for label -1, on the clipped probability.
double LogLoss(double p, int label, double clip = kDefaultClip);

// (y01 - p)^2 with y01 = (label + 1) / 2.
double BrierScore(double p, int label);

// Exact streaming mean of a sequence of per-example losses.
class RunningMean {
 public:
  RunningMean() = default;
  RunningMean(double total, int64_t count) : total_(total), count_(count) {}

  void Add(std::span<const double> batch);
  void Add(double value) {
    total_ += value;
    ++count_;
  }

  double total() const { return total_; }
  int64_t count() const { return count_; }
  // 0 when empty.
  double mean() const {
    return count_ == 0 ? 0.0 : total_ / static_cast<double>(count_);
  }

 private:
  double total_ = 0.0;
  int64_t count_ = 0;
};

inline constexpr int kDefaultReliabilityBins = 10;

// Equal-width reliability histogram on [0, 1]. Probability p falls in bin
// floor(p B), with p = 1 in the last bin.
class ReliabilityBins {
 public:
  struct Bin {
    int64_t count = 0;
    double sum_probability = 0.0;
    int64_t positives = 0;
  };

  explicit ReliabilityBins(int bin_count = kDefaultReliabilityBins);

  static int BinIndex(double p, int bin_count);

  void Add(double p, int label);
  // Throws std::invalid_argument if the bin counts differ.
  void Merge(const ReliabilityBins& other);

  int bin_count() const { return static_cast<int>(bins_.size()); }
  const Bin& bin(int b) const { return bins_[static_cast<size_t>(b)]; }
  int64_t total() const;

  // Mean predicted probability / fraction of positives in a bin; 0 if empty.
  double MeanProbability(int b) const;
  double EmpiricalFrequency(int b) const;

 private:
  std::vector<Bin> bins_;
};

inline constexpr double kNormalCiMultiplier = 1.96;

// Per-index statistics across runs.
struct RunAggregate {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> half_width;
};

// Mean, standard error (sample stdev / sqrt(R)) and half-width
// (multiplier * standard error) at every index. With a single run the error
// terms are zero. Throws std::invalid_argument on no series or ragged series.
RunAggregate AggregateRuns(std::span<const std::vector<double>> series,
                           double multiplier = kNormalCiMultiplier);

}  // namespace calboost

#endif  // CALBOOST_METRICS_H_
