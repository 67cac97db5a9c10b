/*
 * Copyright 2026 The STR Studio Authors.
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

#ifndef STRSTUDIO_UTIL_RANDOM_H_
#define STRSTUDIO_UTIL_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace strstudio::utils {

// Seeded pseudo random source. All derived draws (integers, uniforms,
// gaussians) are computed by this class from the raw 64-bit Mersenne Twister
// output, so a given seed yields the same stream on every standard library.
class Random {
 public:
  explicit Random(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  size_t UniformIndex(size_t n);

  // Uniform integer in [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Uniform double in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal draw (Box-Muller, no caching).
  double Normal();

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = UniformIndex(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace strstudio::utils

#endif  // STRSTUDIO_UTIL_RANDOM_H_
