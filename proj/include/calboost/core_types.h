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

#ifndef CALBOOST_CORE_TYPES_H_
#define CALBOOST_CORE_TYPES_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace calboost {

// A labelled example. Labels are -1 or +1.
struct Example {
  std::vector<double> features;
  int label = 1;
};

// Throws std::invalid_argument if the label is not +-1 or a feature is not
// finite.
void ValidateExample(const Example& example);

// A group of examples revealed together. `index` is the 1-based round number.
struct Minibatch {
  int64_t index = 0;
  std::vector<Example> examples;
};

// Throws std::invalid_argument if empty, dimensions disagree, or any example
// is invalid.
void ValidateMinibatch(const Minibatch& minibatch);

// The two arms of the train/calibrate decision. The numeric value is the arm
// index; ties are always broken towards kTrain.
enum class Action : int { kTrain = 0, kCalibrate = 1 };

inline constexpr int kNumActions = 2;

std::string_view ActionName(Action action);

struct Prediction {
  double score = 0.5;
  double probability = 0.5;
  int predicted_label = 1;
};

// Deterministic random stream. The engine is mt19937_64, whose output is fixed
// by the standard; all distributions are implemented here rather than taken
// from <random>, whose distribution algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double NextUniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1).
  double NextUniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  uint64_t NextBelow(uint64_t bound);

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.seed_ == b.seed_ && a.engine_ == b.engine_;
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

// Upper bound on a single Poisson draw.
inline constexpr int kPoissonMaxDraw = 100;

// Poisson(lambda) by inversion with sequential search, capped at
// kPoissonMaxDraw. Consumes exactly one uniform per call.
int SamplePoisson(double lambda, RngStream& rng);

// Normal(mean, variance) by Box-Muller. Consumes exactly two uniforms.
double SampleGaussian(double mean, double variance, RngStream& rng);

// In-place Fisher-Yates shuffle.
template <typename T>
void Shuffle(std::span<T> items, RngStream& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace calboost

#endif  // CALBOOST_CORE_TYPES_H_
