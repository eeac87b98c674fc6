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

#include "graf/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "graf/error.hpp"
#include "graf/parallel.hpp"
#include "graf/random.hpp"

namespace graf {

std::size_t SubspaceSpec::resolve(std::size_t n_features) const {
  if (n_features == 0) throw UsageError("cannot resolve subspace for d = 0");
  const auto d = static_cast<double>(n_features);
  double m = 0.0;
  switch (rule) {
    case SubspaceRule::kLog2:
      m = std::ceil(std::log2(d));
      break;
    case SubspaceRule::kSqrt:
      m = std::ceil(std::sqrt(d));
      break;
    case SubspaceRule::kHalf:
      m = std::ceil(d / 2.0);
      break;
    case SubspaceRule::kAll:
      m = d;
      break;
    case SubspaceRule::kFixed:
      if (fixed == 0) throw UsageError("subspace size must be positive");
      if (fixed > n_features) {
        throw UsageError("subspace size " + std::to_string(fixed) +
                         " exceeds feature count " +
                         std::to_string(n_features));
      }
      return fixed;
  }
  return std::clamp(static_cast<std::size_t>(m), std::size_t{1}, n_features);
}

SubspaceSpec SubspaceSpec::parse(const std::string& text) {
  if (text == "log2") return {SubspaceRule::kLog2, 0};
  if (text == "sqrt") return {SubspaceRule::kSqrt, 0};
  if (text == "half") return {SubspaceRule::kHalf, 0};
  if (text == "all") return {SubspaceRule::kAll, 0};
  std::size_t k = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, k);
  if (ec != std::errc{} || ptr != end || k == 0) {
    throw UsageError("invalid subspace '" + text +
                     "' (expected log2, sqrt, half, all or a positive integer)");
  }
  return {SubspaceRule::kFixed, k};
}

std::string SubspaceSpec::to_string() const {
  switch (rule) {
    case SubspaceRule::kLog2:
      return "log2";
    case SubspaceRule::kSqrt:
      return "sqrt";
    case SubspaceRule::kHalf:
      return "half";
    case SubspaceRule::kAll:
      return "all";
    case SubspaceRule::kFixed:
      return std::to_string(fixed);
  }
  return "?";
}

void ForestConfig::validate(std::size_t n_features) const {
  if (n_trees == 0) throw UsageError("forest needs at least one tree");
  if (min_samples_split < 2) {
    throw UsageError("min_samples_split must be at least 2");
  }
  subspace.resolve(n_features);
}

TreeInstance train_tree(const Dataset& data, const ForestConfig& config,
                        std::size_t index) {
  const std::size_t m = config.subspace.resolve(data.n_features());
  Rng rng(derive_seed(config.master_seed, index));
  const SubspaceView sub = SubspaceView::sample(data.n_features(), m, rng);
  GrowConfig grow;
  grow.min_samples_split = config.min_samples_split;
  return grow_tree(data, sub, grow, rng);
}

Forest train_forest(const Dataset& data, const ForestConfig& config,
                    unsigned threads) {
  if (data.empty()) throw UsageError("cannot train on an empty dataset");
  config.validate(data.n_features());

  Forest forest;
  forest.config = config;
  forest.n_features = data.n_features();
  forest.subspace_size = config.subspace.resolve(data.n_features());
  forest.class_totals.assign(data.class_totals().begin(),
                             data.class_totals().end());
  forest.feature_names = data.feature_names();
  forest.class_labels = data.class_labels();
  forest.trees.resize(config.n_trees);
  parallel_for(config.n_trees, threads, [&](std::size_t k) {
    forest.trees[k] = train_tree(data, config, k);
  });
  return forest;
}

namespace {

void check_row(const Forest& forest, std::span<const double> row) {
  if (row.size() != forest.n_features) {
    throw DataError("sample has " + std::to_string(row.size()) +
                    " features, model expects " +
                    std::to_string(forest.n_features));
  }
}

std::size_t effective_trees(const Forest& forest, std::size_t n_trees) {
  if (n_trees == 0) return forest.trees.size();
  if (n_trees > forest.trees.size()) {
    throw UsageError("requested " + std::to_string(n_trees) +
                     " trees from a forest of " +
                     std::to_string(forest.trees.size()));
  }
  return n_trees;
}

void check_dataset(const Forest& forest, const Dataset& data) {
  if (data.n_features() != forest.n_features) {
    throw DataError("dataset has " + std::to_string(data.n_features()) +
                    " features, model expects " +
                    std::to_string(forest.n_features));
  }
}

}  // namespace

std::vector<double> predict_scores(const Forest& forest,
                                   std::span<const double> row,
                                   std::size_t n_trees) {
  check_row(forest, row);
  const std::size_t used = effective_trees(forest, n_trees);
  std::vector<double> scores(forest.n_classes(), 0.0);
  for (std::size_t k = 0; k < used; ++k) {
    const auto& post = forest.trees[k].traverse(row).posterior;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      scores[c] += std::log2(1.0 + post[c]);
    }
  }
  return scores;
}

ClassId argmax_class(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<ClassId>(best);
}

ClassId predict(const Forest& forest, std::span<const double> row,
                std::size_t n_trees) {
  return argmax_class(predict_scores(forest, row, n_trees));
}

std::vector<ClassId> predict(const Forest& forest, const Dataset& data,
                             unsigned threads) {
  check_dataset(forest, data);
  std::vector<ClassId> out(data.size());
  parallel_for(data.size(), threads,
               [&](std::size_t i) { out[i] = predict(forest, data.row(i)); });
  return out;
}

std::vector<std::vector<ClassId>> predict_per_tree(const Forest& forest,
                                                   const Dataset& data,
                                                   unsigned threads) {
  check_dataset(forest, data);
  std::vector<std::vector<ClassId>> out(forest.trees.size(),
                                        std::vector<ClassId>(data.size()));
  parallel_for(forest.trees.size(), threads, [&](std::size_t t) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      out[t][i] = argmax_class(forest.trees[t].traverse(data.row(i)).posterior);
    }
  });
  return out;
}

std::vector<std::vector<ClassId>> predict_with_prefixes(
    const Forest& forest, const Dataset& data,
    std::span<const std::size_t> tree_counts, unsigned threads) {
  check_dataset(forest, data);
  for (const std::size_t l : tree_counts) {
    if (l == 0) throw UsageError("tree count must be positive");
    effective_trees(forest, l);
  }
  std::vector<std::vector<ClassId>> out(tree_counts.size(),
                                        std::vector<ClassId>(data.size()));
  const std::size_t max_l =
      tree_counts.empty()
          ? 0
          : *std::max_element(tree_counts.begin(), tree_counts.end());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    const auto row = data.row(i);
    std::vector<double> scores(forest.n_classes(), 0.0);
    for (std::size_t k = 0; k < max_l; ++k) {
      const auto& post = forest.trees[k].traverse(row).posterior;
      for (std::size_t c = 0; c < scores.size(); ++c) {
        scores[c] += std::log2(1.0 + post[c]);
      }
      for (std::size_t q = 0; q < tree_counts.size(); ++q) {
        if (tree_counts[q] == k + 1) out[q][i] = argmax_class(scores);
      }
    }
  });
  return out;
}

MarginReport margin(const Forest& forest, const Dataset& data,
                    unsigned threads) {
  const auto predicted = predict(forest, data, threads);
  MarginReport report;
  report.per_sample.resize(data.size());
  long total = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    // 1(H = y) - max_{j != y} 1(H = j) collapses to ±1 for a hard decision.
    report.per_sample[i] = predicted[i] == data.label(i) ? 1 : -1;
    total += report.per_sample[i];
  }
  report.mean = data.empty() ? 0.0
                             : static_cast<double>(total) /
                                   static_cast<double>(data.size());
  return report;
}

double accuracy(std::span<const ClassId> predicted,
                std::span<const ClassId> truth) {
  if (predicted.size() != truth.size()) {
    throw UsageError("prediction and truth lengths differ");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += predicted[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace graf
