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

namespace graf {

// Kohavi-Wolpert 0-1 loss decomposition over R models.
struct BVResult {
  double bias2 = 0.0;
  double variance = 0.0;
  double err = 0.0;
  std::size_t models = 0;
  std::size_t test_size = 0;
  // bias2 came out below -1e-12 (the finite-R correction overshot).
  bool bias2_negative = false;
};

// predictions[r][i] is model r's class for test row i. Throws UsageError
// when fewer than two models are given or shapes disagree.
BVResult kw_decompose(const std::vector<std::vector<ClassId>>& predictions,
                      std::span<const ClassId> truth, std::size_t n_classes);

// Strength, correlation and the resulting generalisation bound for a
// voting ensemble.
struct SCResult {
  double strength = 0.0;
  double correlation = 0.0;
  double sd = 0.0;
  double pe_bound = 0.0;
  bool correlation_defined = false;  // false when sd == 0
  bool pe_bound_defined = false;     // needs strength > 0 and sd > 0
};

// per_tree[t][i] is tree t's class for test row i. Needs >= 2 trees.
SCResult strength_correlation(const std::vector<std::vector<ClassId>>& per_tree,
                              std::span<const ClassId> truth,
                              std::size_t n_classes);

// Spearman rank correlation with average ranks for ties. NaN if either
// input is constant.
double spearman(std::span<const double> a, std::span<const double> b);

// Fold id in [0, k) per row, stratified by class: each class is shuffled
// and dealt round-robin, continuing the deal across classes.
std::vector<std::size_t> stratified_folds(std::span<const ClassId> labels,
                                          std::size_t n_classes, std::size_t k,
                                          std::uint64_t seed);

struct CvGrid {
  std::vector<std::size_t> n_trees;
  std::vector<SubspaceSpec> subspaces;
  std::vector<std::size_t> min_samples_split;

  // Trees {100, 200, 500, 1000, 2000}; subspace {log2, sqrt, half, all};
  // min split {2, 3, 4, 5}.
  static CvGrid defaults();
  std::size_t size() const {
    return n_trees.size() * subspaces.size() * min_samples_split.size();
  }
};

struct CvFold {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t n_trees = 0;
  SubspaceSpec subspace;
  std::size_t min_samples_split = 0;
  double inner_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct CvReport {
  std::vector<CvFold> folds;
  double mean_accuracy = 0.0;
  std::vector<std::string> warnings;
};

struct CvOptions {
  std::size_t outer_folds = 4;
  std::size_t inner_folds = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// Outer stratified k-fold for testing, inner stratified k-fold on each
// outer training split to pick hyper-parameters by plain accuracy. Ties in
// inner accuracy keep the earliest grid point (trees, then subspace, then
// min split, each in the order given).
CvReport cv_protocol(const Dataset& data, const CvGrid& grid,
                     const CvOptions& options);

// Repeated-resample bias-variance study. The first `test_size` rows of a
// seeded permutation form the test set (0 = half the data); each of
// `models` training sets is drawn without replacement from the rest.
struct BvConfig {
  std::vector<std::size_t> train_sizes;
  std::vector<std::size_t> tree_counts{100};
  std::vector<SubspaceSpec> subspaces{SubspaceSpec{SubspaceRule::kHalf, 0}};
  std::size_t min_samples_split = 2;
  std::size_t models = 10;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct BvRow {
  std::size_t train_size = 0;
  std::size_t n_trees = 0;
  std::string subspace;
  std::size_t subspace_size = 0;
  BVResult result;
};

std::vector<BvRow> bias_variance_experiment(const Dataset& data,
                                            const BvConfig& config);

// Strength/correlation across subspace sizes. Test split as for
// bias-variance; every model trains on `train_size` rows (0 = whole pool)
// and the reported figures are averaged over models.
struct ScConfig {
  std::vector<std::size_t> subspace_sizes;
  std::size_t n_trees = 100;
  std::size_t min_samples_split = 2;
  std::size_t models = 1;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct ScRow {
  std::size_t subspace_size = 0;
  SCResult result;  // model-averaged; *_defined true only if all models were
  double test_accuracy = 0.0;
  std::size_t models = 0;
};

std::vector<ScRow> strength_correlation_experiment(const Dataset& data,
                                                   const ScConfig& config);

}  // namespace graf
