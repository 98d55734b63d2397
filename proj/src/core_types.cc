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

#include "calboost/core_types.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace calboost {

void ValidateExample(const Example& example) {
  if (example.label != 1 && example.label != -1) {
    throw std::invalid_argument("label must be -1 or +1, got " +
                                std::to_string(example.label));
  }
  for (double v : example.features) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite feature value");
    }
  }
}

void ValidateMinibatch(const Minibatch& minibatch) {
  if (minibatch.examples.empty()) {
    throw std::invalid_argument("empty minibatch");
  }
  const size_t dims = minibatch.examples.front().features.size();
  for (const Example& example : minibatch.examples) {
    if (example.features.size() != dims) {
      throw std::invalid_argument("minibatch examples disagree on dimension");
    }
    ValidateExample(example);
  }
}

std::string_view ActionName(Action action) {
  return action == Action::kTrain ? "train" : "calibrate";
}

uint64_t RngStream::NextBelow(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("NextBelow: zero bound");
  const uint64_t limit =
      std::numeric_limits<uint64_t>::max() -
      std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

int SamplePoisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Poisson rate must be finite and >= 0");
  }
  const double u = rng.NextUniform();
  // For large lambda exp(-lambda) underflows to zero and the search simply
  // runs into the cap.
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u >= cdf && k < kPoissonMaxDraw) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

double SampleGaussian(double mean, double variance, RngStream& rng) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("Gaussian variance must be finite and > 0");
  }
  const double u1 = rng.NextUniformOpen();
  const double u2 = rng.NextUniform();
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + std::sqrt(variance) * z;
}

}  // namespace calboost
