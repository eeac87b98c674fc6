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

#include "graf/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graf/error.hpp"
#include "graf/parallel.hpp"

namespace graf {

std::size_t partition_weight_count(const TreeInstance& /*tree*/,
                                   const LeafRecord& leaf) {
  return leaf.weight_count;
}

std::vector<std::vector<std::size_t>> leaf_members(const TreeInstance& tree,
                                                   const Dataset& data) {
  std::vector<std::vector<std::size_t>> members(tree.leaves.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    members[tree.leaf_index(data.row(i))].push_back(i);
  }
  return members;
}

std::vector<double> ranked_importance(const TreeInstance& tree,
                                      const Dataset& data, RankOrder order,
                                      Rng* rng) {
  if (order == RankOrder::kShuffled && rng == nullptr) {
    throw UsageError("shuffled ranking needs a random source");
  }
  auto members = leaf_members(tree, data);
  std::vector<double> theta(data.size(), 0.0);
  for (std::size_t l = 0; l < members.size(); ++l) {
    auto& rows = members[l];
    if (order == RankOrder::kShuffled) rng->shuffle(std::span<std::size_t>(rows));
    const auto w = static_cast<double>(
        partition_weight_count(tree, tree.leaves[l]));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      theta[rows[r]] = w / static_cast<double>(r + 1);
    }
  }
  return theta;
}

std::vector<double> class_normalized_sensitivity(std::span<const double> theta,
                                                 std::span<const ClassId> labels,
                                                 std::size_t n_classes) {
  if (theta.size() != labels.size()) {
    throw UsageError("importance and label vectors differ in length");
  }
  std::vector<double> class_mass(n_classes, 0.0);
  std::vector<std::size_t> class_size(n_classes, 0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= n_classes) throw UsageError("label outside class range");
    class_mass[c] += theta[i];
    ++class_size[c];
  }
  std::vector<double> s(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    const double share = class_mass[c] > 0.0
                             ? theta[i] / class_mass[c]
                             : 1.0 / static_cast<double>(class_size[c]);
    s[i] = std::log1p(share);
  }
  return s;
}

SensitivityReport aggregate(const std::vector<std::vector<double>>& per_tree,
                            bool keep_per_tree) {
  if (per_tree.empty()) throw UsageError("sensitivity needs at least one tree");
  const std::size_t n = per_tree.front().size();
  SensitivityReport report;
  report.mean.assign(n, 0.0);
  for (const auto& s : per_tree) {
    if (s.size() != n) throw UsageError("per-tree sensitivity rows differ");
    for (std::size_t i = 0; i < n; ++i) report.mean[i] += s[i];
  }
  const auto trees = static_cast<double>(per_tree.size());
  double total = 0.0;
  for (auto& v : report.mean) {
    v /= trees;
    total += v;
  }
  report.probability.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.probability[i] = total > 0.0 ? report.mean[i] / total
                                        : 1.0 / static_cast<double>(n);
  }
  if (keep_per_tree) report.per_tree = per_tree;
  return report;
}

SensitivityReport compute_sensitivity(const Forest& forest, const Dataset& data,
                                      const SensitivityOptions& options,
                                      unsigned threads) {
  if (data.n_features() != forest.n_features) {
    throw DataError("dataset has " + std::to_string(data.n_features()) +
                    " features, model expects " +
                    std::to_string(forest.n_features));
  }
  if (data.n_classes() != forest.n_classes()) {
    throw DataError("dataset class count differs from the model's");
  }
  std::vector<std::vector<double>> per_tree(forest.trees.size());
  parallel_for(forest.trees.size(), threads, [&](std::size_t t) {
    Rng rng(derive_seed(options.shuffle_seed, t));
    const auto theta =
        ranked_importance(forest.trees[t], data, options.order, &rng);
    per_tree[t] =
        class_normalized_sensitivity(theta, data.labels(), data.n_classes());
  });
  return aggregate(per_tree, options.keep_per_tree);
}

SampleMode parse_sample_mode(const std::string& text) {
  if (text == "uniform") return SampleMode::kUniform;
  if (text == "weighted") return SampleMode::kWeighted;
  if (text == "top") return SampleMode::kTop;
  throw UsageError("unknown sampling mode '" + text +
                   "' (expected uniform, weighted or top)");
}

const char* to_string(SampleMode mode) noexcept {
  switch (mode) {
    case SampleMode::kUniform:
      return "uniform";
    case SampleMode::kWeighted:
      return "weighted";
    case SampleMode::kTop:
      return "top";
  }
  return "unknown";
}

std::size_t subsample_size(std::size_t n, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw UsageError("fraction must be in (0, 1]");
  }
  const double raw = fraction * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::min(k, n);
}

std::vector<std::size_t> subsample(std::span<const double> mean,
                                   std::span<const double> probability,
                                   double fraction, SampleMode mode, Rng& rng) {
  const std::size_t n = mean.size();
  if (probability.size() != n) {
    throw UsageError("sensitivity and probability vectors differ in length");
  }
  const std::size_t k = subsample_size(n, fraction);
  if (k == 0) throw UsageError("fraction selects no samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  switch (mode) {
    case SampleMode::kUniform:
      return rng.sample_without_replacement(n, k);
    case SampleMode::kWeighted: {
      // Exponential-key form of successive sampling: key = ln(u) / p.
      std::vector<double> key(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        key[i] = probability[i] > 0.0
                     ? std::log(u > 0.0 ? u : 0x1.0p-53) / probability[i]
                     : -std::numeric_limits<double>::infinity();
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
      break;
    }
    case SampleMode::kTop:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
      break;
  }
  order.resize(k);
  return order;
}

}  // namespace graf
