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
#include "graf/random.hpp"

namespace graf {

// Sorted, distinct, zero-based feature indices a tree is restricted to.
class SubspaceView {
 public:
  SubspaceView() = default;
  // Throws UsageError unless indices are distinct and < n_features. Sorts.
  SubspaceView(std::vector<std::size_t> indices, std::size_t n_features);

  static SubspaceView all(std::size_t n_features);
  // M indices drawn uniformly without replacement from [0, n_features).
  static SubspaceView sample(std::size_t n_features, std::size_t m, Rng& rng);

  std::size_t size() const noexcept { return indices_.size(); }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }

  // Copies the subspace coordinates of a full-dimensional row into `out`.
  void project(std::span<const double> row, std::span<double> out) const;

  friend bool operator==(const SubspaceView&, const SubspaceView&) = default;

 private:
  std::vector<std::size_t> indices_;
};

struct Hyperplane {
  std::vector<double> weights;  // aligned with the tree's SubspaceView
  double bias = 0.0;

  // Σ w_j x_j + bias over subspace coordinates.
  double score(std::span<const double> x_sub) const;
  // Same sum, reading coordinates through the subspace from a full row.
  double score(std::span<const double> row, const SubspaceView& sub) const;
};

// Per-feature extent and centroid of a partition in subspace coordinates.
struct PartitionStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> mean;

  bool all_constant() const;
};

enum class PartitionState : std::uint8_t { kImpure, kPure, kUnsplittable };

const char* to_string(PartitionState state) noexcept;

// Min/max/mean of `members` restricted to `sub`. Throws UsageError if
// `members` is empty.
PartitionStats partition_stats(const Dataset& data,
                               std::span<const std::size_t> members,
                               const SubspaceView& sub);

// Weights uniform on (min_j + eps, max_j - eps) with
// eps = 1e-9 * max(1, max_j - min_j); a collapsed interval takes min_j.
// Bias places the partition mean exactly on the zero level set.
Hyperplane draw_hyperplane(const PartitionStats& stats, Rng& rng);

// Bias that centres `weights` on `mean`.
double centred_bias(std::span<const double> weights,
                    std::span<const double> mean);

// 1 iff the score is strictly positive.
inline int assign_bit(const Hyperplane& h, std::span<const double> x_sub) {
  return h.score(x_sub) > 0.0 ? 1 : 0;
}

// Size-weighted Gini impurity over class frequencies normalised by class
// totals:
//   Z = (1 - Σ_c r_c² / (Σ_c r_c)²) · n,  r_c = n_c / N_c.
// Classes absent from the partition contribute nothing. Throws UsageError
// for an empty partition or a present class with zero total.
double impurity(std::span<const std::size_t> class_counts,
                std::span<const std::size_t> class_totals);

// Impurity of the samples `members` of `data`.
double impurity(const Dataset& data, std::span<const std::size_t> members);

// Leaf posterior from raw class counts with inverse-frequency reweighting
// IF_c = N / N_c. Sums to 1.
std::vector<double> class_posterior(std::span<const std::size_t> class_counts,
                                    std::span<const std::size_t> class_totals);

struct TreeNode {
  int parent = -1;
  int bit = -1;   // edge label from the parent; -1 at the root
  int step = -1;  // hyperplane that dichotomised this node; -1 for a leaf
  int children[2] = {-1, -1};
  int leaf = -1;  // index into TreeInstance::leaves for leaf nodes

  bool is_leaf() const noexcept { return step < 0; }
};

struct LeafRecord {
  std::string code;  // '0'/'1' per dichotomising hyperplane on the path
  int node = -1;
  PartitionState state = PartitionState::kPure;
  std::size_t created_step = 0;  // hyperplanes applied when created
  std::size_t weight_count = 0;  // hyperplanes applied when finalised
  std::size_t size = 0;
  std::vector<std::size_t> class_counts;
  std::vector<double> posterior;
  // Training rows in the leaf. Empty for trees restored from disk.
  std::vector<std::size_t> sample_indices;
};

// One high-variance partitioner. Hyperplane k is the k-th global step.
struct TreeInstance {
  SubspaceView subspace;
  std::vector<Hyperplane> hyperplanes;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<LeafRecord> leaves;

  // Leaf reached by a full-dimensional sample.
  const LeafRecord& traverse(std::span<const double> row) const;
  std::size_t leaf_index(std::span<const double> row) const;
};

struct GrowConfig {
  std::size_t min_samples_split = 2;
  std::size_t max_draws = 32;
};

// Optional diagnostics collected while growing.
struct SplitRecord {
  std::size_t step = 0;
  std::size_t parent_size = 0;
  double parent_impurity = 0.0;
  double child_impurity[2] = {0.0, 0.0};
};

struct GrowTrace {
  std::vector<SplitRecord> splits;
  // Samples covered by alive partitions after every step; always N.
  std::vector<std::size_t> covered_after_step;
  std::size_t rejected_draws = 0;
  std::size_t exhausted_partitions = 0;
};

// Grows a tree by repeatedly drawing a hyperplane from the most impure
// partition and applying it to every impure partition. Throws UsageError
// for an empty dataset or min_samples_split < 2.
TreeInstance grow_tree(const Dataset& data, const SubspaceView& sub,
                       const GrowConfig& config, Rng& rng,
                       GrowTrace* trace = nullptr);

// Recomputes every leaf posterior from its class counts.
void assign_leaf_posteriors(TreeInstance& tree,
                            std::span<const std::size_t> class_totals);

}  // namespace graf
