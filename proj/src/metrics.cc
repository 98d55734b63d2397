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

#include "calboost/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calboost {

double ClipProbability(double p, double clip) {
  return std::clamp(p, clip, 1.0 - clip);
}

double LogLoss(double p, int label, double clip) {
  const double q = ClipProbability(p, clip);
  return label > 0 ? -std::log(q) : -std::log(1.0 - q);
}

double BrierScore(double p, int label) {
  const double y = label > 0 ? 1.0 : 0.0;
  return (y - p) * (y - p);
}

void RunningMean::Add(std::span<const double> batch) {
  for (double v : batch) total_ += v;
  count_ += static_cast<int64_t>(batch.size());
}

ReliabilityBins::ReliabilityBins(int bin_count) {
  if (bin_count < 1) throw std::invalid_argument("need at least one bin");
  bins_.resize(static_cast<size_t>(bin_count));
}

int ReliabilityBins::BinIndex(double p, int bin_count) {
  const int b = static_cast<int>(std::floor(p * bin_count));
  return std::clamp(b, 0, bin_count - 1);
}

void ReliabilityBins::Add(double p, int label) {
  Bin& bin = bins_[static_cast<size_t>(BinIndex(p, bin_count()))];
  ++bin.count;
  bin.sum_probability += p;
  if (label > 0) ++bin.positives;
}

void ReliabilityBins::Merge(const ReliabilityBins& other) {
  if (other.bins_.size() != bins_.size()) {
    throw std::invalid_argument("cannot merge reliability bins of different sizes");
  }
  for (size_t b = 0; b < bins_.size(); ++b) {
    bins_[b].count += other.bins_[b].count;
    bins_[b].sum_probability += other.bins_[b].sum_probability;
    bins_[b].positives += other.bins_[b].positives;
  }
}

int64_t ReliabilityBins::total() const {
  int64_t n = 0;
  for (const Bin& bin : bins_) n += bin.count;
  return n;
}

double ReliabilityBins::MeanProbability(int b) const {
  const Bin& bin = bins_[static_cast<size_t>(b)];
  return bin.count == 0 ? 0.0 : bin.sum_probability / static_cast<double>(bin.count);
}

double ReliabilityBins::EmpiricalFrequency(int b) const {
  const Bin& bin = bins_[static_cast<size_t>(b)];
  return bin.count == 0
             ? 0.0
             : static_cast<double>(bin.positives) / static_cast<double>(bin.count);
}

RunAggregate AggregateRuns(std::span<const std::vector<double>> series,
                           double multiplier) {
  if (series.empty()) throw std::invalid_argument("no runs to aggregate");
  const size_t length = series.front().size();
  for (const auto& s : series) {
    if (s.size() != length) {
      throw std::invalid_argument("runs have different lengths");
    }
  }
  const double runs = static_cast<double>(series.size());
  RunAggregate out;
  out.mean.resize(length);
  out.std_error.resize(length);
  out.half_width.resize(length);
  for (size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    for (const auto& s : series) sum += s[i];
    const double mean = sum / runs;
    double sq = 0.0;
    for (const auto& s : series) sq += (s[i] - mean) * (s[i] - mean);
    const double stdev = series.size() > 1 ? std::sqrt(sq / (runs - 1.0)) : 0.0;
    out.mean[i] = mean;
    out.std_error[i] = stdev / std::sqrt(runs);
    out.half_width[i] = multiplier * out.std_error[i];
  }
  return out;
}

}  // namespace calboost
