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
#include "graf/partition_engine.hpp"

namespace graf {

enum class SubspaceRule : std::uint8_t { kLog2, kSqrt, kHalf, kAll, kFixed };

// How many features each tree sees.
struct SubspaceSpec {
  SubspaceRule rule = SubspaceRule::kSqrt;
  std::size_t fixed = 0;  // used when rule == kFixed

  // ceil(log2 d), ceil(sqrt d), ceil(d/2), d or the fixed size, clamped to
  // [1, d]. Throws UsageError if a fixed size exceeds d or is zero.
  std::size_t resolve(std::size_t n_features) const;

  // "log2" | "sqrt" | "half" | "all" | a positive integer.
  static SubspaceSpec parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const SubspaceSpec&, const SubspaceSpec&) = default;
};

struct ForestConfig {
  std::size_t n_trees = 100;
  SubspaceSpec subspace;
  std::size_t min_samples_split = 2;
  std::uint64_t master_seed = 0;

  void validate(std::size_t n_features) const;
};

struct Forest {
  std::vector<TreeInstance> trees;
  ForestConfig config;
  std::size_t n_features = 0;
  std::size_t subspace_size = 0;
  std::vector<std::size_t> class_totals;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_labels;

  std::size_t n_classes() const noexcept { return class_totals.size(); }
};

// Tree k is grown with Rng(derive_seed(master_seed, k)), so its content does
// not depend on the number of trees or on `threads` (0 = default count).
Forest train_forest(const Dataset& data, const ForestConfig& config,
                    unsigned threads = 0);

// Grows only tree `index` of the forest that train_forest would produce.
TreeInstance train_tree(const Dataset& data, const ForestConfig& config,
                        std::size_t index);

// Σ_k log2(1 + h_k(x, c)) over the first `n_trees` trees (0 = all).
std::vector<double> predict_scores(const Forest& forest,
                                   std::span<const double> row,
                                   std::size_t n_trees = 0);

// Index of the largest score; ties go to the smallest class id.
ClassId argmax_class(std::span<const double> scores);

ClassId predict(const Forest& forest, std::span<const double> row,
                std::size_t n_trees = 0);

std::vector<ClassId> predict(const Forest& forest, const Dataset& data,
                             unsigned threads = 1);

// Class predicted by each individual tree (argmax of its leaf posterior):
// result[t][i] for tree t and row i.
std::vector<std::vector<ClassId>> predict_per_tree(const Forest& forest,
                                                   const Dataset& data,
                                                   unsigned threads = 1);

// Ensemble predictions using only the first L trees, for each L in
// `tree_counts`: result[k][i]. Every L must be in [1, trees.size()].
std::vector<std::vector<ClassId>> predict_with_prefixes(
    const Forest& forest, const Dataset& data,
    std::span<const std::size_t> tree_counts, unsigned threads = 1);

struct MarginReport {
  std::vector<int> per_sample;  // +1 correct, -1 wrong
  double mean = 0.0;
};

// Hard-vote margin of the ensemble decision over labelled rows.
MarginReport margin(const Forest& forest, const Dataset& data,
                    unsigned threads = 1);

double accuracy(std::span<const ClassId> predicted,
                std::span<const ClassId> truth);

}  // namespace graf
