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
#include <span>
#include <string>
#include <vector>

#include "graf/dataset.hpp"
#include "graf/forest.hpp"
#include "graf/partition_engine.hpp"
#include "graf/random.hpp"

namespace graf {

// How members of a leaf are ranked before their share is divided out.
enum class RankOrder : std::uint8_t { kAscendingIndex, kShuffled };

struct SensitivityOptions {
  RankOrder order = RankOrder::kAscendingIndex;
  std::uint64_t shuffle_seed = 0;  // used with kShuffled
  bool keep_per_tree = false;
};

struct SensitivityReport {
  std::vector<double> mean;         // per-sample mean over trees
  std::vector<double> probability;  // mean / Σ mean
  std::vector<std::vector<double>> per_tree;  // [tree][sample], optional
};

// Number of hyperplanes the tree had generated when the leaf was finalised.
std::size_t partition_weight_count(const TreeInstance& tree,
                                   const LeafRecord& leaf);

// Rows of `data` grouped by the leaf they reach, ascending row order.
std::vector<std::vector<std::size_t>> leaf_members(const TreeInstance& tree,
                                                   const Dataset& data);

// θ_i = W(leaf(i)) / rank_i, rank counted from 1 within each leaf. With
// kShuffled the ranking inside each leaf is a permutation drawn from `rng`.
std::vector<double> ranked_importance(const TreeInstance& tree,
                                      const Dataset& data,
                                      RankOrder order = RankOrder::kAscendingIndex,
                                      Rng* rng = nullptr);

// s_i = ln(1 + θ_i / Θ_{y_i}) with Θ_j the total θ of class j. A class with
// Θ_j = 0 takes θ_i / Θ_j = 1 / |class j|.
std::vector<double> class_normalized_sensitivity(std::span<const double> theta,
                                                 std::span<const ClassId> labels,
                                                 std::size_t n_classes);

// Mean over trees and the induced sampling distribution. Throws UsageError
// when no trees are given or rows differ in length.
SensitivityReport aggregate(const std::vector<std::vector<double>>& per_tree,
                            bool keep_per_tree = false);

// Full pipeline over every tree of the forest. Per-tree work runs on
// `threads` workers; the result does not depend on the count.
SensitivityReport compute_sensitivity(const Forest& forest, const Dataset& data,
                                      const SensitivityOptions& options = {},
                                      unsigned threads = 1);

enum class SampleMode : std::uint8_t { kUniform, kWeighted, kTop };

SampleMode parse_sample_mode(const std::string& text);
const char* to_string(SampleMode mode) noexcept;

// ceil(fraction * n) with a guard against representation error.
std::size_t subsample_size(std::size_t n, double fraction);

// Draws ceil(fraction * N) distinct indices:
//  - uniform:  uniform without replacement;
//  - weighted: successive draws without replacement proportional to p;
//  - top:      highest mean sensitivity first, ties by ascending index.
// Indices are returned in selection order.
std::vector<std::size_t> subsample(std::span<const double> mean,
                                   std::span<const double> probability,
                                   double fraction, SampleMode mode, Rng& rng);

inline std::vector<std::size_t> subsample(const SensitivityReport& report,
                                          double fraction, SampleMode mode,
                                          Rng& rng) {
  return subsample(report.mean, report.probability, fraction, mode, rng);
}

}  // namespace graf
