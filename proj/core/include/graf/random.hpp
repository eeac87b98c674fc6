/*
 * Copyright 2026 The GRAF Authors.
 *
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace graf {

// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for stream `index` under `master`. Streams are independent of how
// many siblings exist.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b) noexcept;

// Portable random source. std::mt19937_64's output sequence is fixed by the
// standard; the distributions below are written out so that draws are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform on [lo, hi). Returns lo when hi <= lo.
  double uniform(double lo, double hi);

  // Uniform integer on [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal (Marsaglia polar method).
  double normal();

  // k distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace graf
