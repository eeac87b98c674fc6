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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "brute_force.hpp"
#include "graf/error.hpp"
#include "graf/model_io.hpp"
#include "test_support.hpp"

namespace graf {
namespace {

using testing::make_dataset;
using testing::random_dataset;
using testing::xor4;

// A tree with no hyperplanes whose single leaf carries `posterior`.
TreeInstance constant_tree(std::vector<double> posterior) {
  TreeInstance t;
  t.subspace = SubspaceView::all(1);
  t.nodes.push_back(TreeNode{});
  t.nodes[0].leaf = 0;
  LeafRecord leaf;
  leaf.node = 0;
  leaf.size = 1;
  leaf.class_counts.assign(posterior.size(), 0);
  leaf.posterior = std::move(posterior);
  t.leaves.push_back(std::move(leaf));
  return t;
}

Forest forest_of(std::vector<std::vector<double>> posteriors) {
  Forest f;
  f.n_features = 1;
  f.subspace_size = 1;
  f.class_totals.assign(posteriors.front().size(), 1);
  for (std::size_t c = 0; c < posteriors.front().size(); ++c) {
    f.class_labels.push_back(std::to_string(c + 1));
  }
  f.feature_names = {"x1"};
  for (auto& p : posteriors) f.trees.push_back(constant_tree(std::move(p)));
  f.config.n_trees = f.trees.size();
  return f;
}

const std::vector<double> kAnyRow{0.0};

TEST(SubspaceSpec, ResolveRules) {
  EXPECT_EQ(SubspaceSpec::parse("log2").resolve(10), 4u);
  EXPECT_EQ(SubspaceSpec::parse("sqrt").resolve(10), 4u);
  EXPECT_EQ(SubspaceSpec::parse("half").resolve(9), 5u);
  EXPECT_EQ(SubspaceSpec::parse("all").resolve(7), 7u);
  EXPECT_EQ(SubspaceSpec::parse("3").resolve(7), 3u);
  EXPECT_EQ(SubspaceSpec::parse("log2").resolve(1), 1u);
  EXPECT_THROW(SubspaceSpec::parse("8").resolve(7), UsageError);
  EXPECT_THROW(SubspaceSpec::parse("0"), UsageError);
  EXPECT_THROW(SubspaceSpec::parse("most"), UsageError);
  EXPECT_EQ(SubspaceSpec::parse("half").to_string(), "half");
  EXPECT_EQ(SubspaceSpec::parse("6").to_string(), "6");
}

TEST(PredictScores, TwoTreeExample) {
  const Forest f = forest_of({{1.0, 0.0}, {0.5, 0.5}});
  const auto s = predict_scores(f, kAnyRow);
  EXPECT_NEAR(s[0], 1.0 + std::log2(1.5), 1e-15);
  EXPECT_NEAR(s[1], std::log2(1.5), 1e-15);
  EXPECT_NEAR(s[0], 1.585, 5e-4);
  EXPECT_NEAR(s[1], 0.585, 5e-4);
  EXPECT_EQ(predict(f, kAnyRow), 0);
}

TEST(PredictScores, OneHotIsVoting) {
  const Forest f = forest_of({{1, 0}, {1, 0}, {1, 0}});
  const auto s = predict_scores(f, kAnyRow);
  EXPECT_EQ(s, (std::vector<double>{3.0, 0.0}));
  EXPECT_EQ(predict(f, kAnyRow), 0);

  const Forest g = forest_of({{0, 1, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_EQ(predict(g, kAnyRow), 1);
}

TEST(PredictScores, UniformTieGoesToSmallestClass) {
  const Forest f = forest_of({{0.5, 0.5}});
  const auto s = predict_scores(f, kAnyRow);
  EXPECT_EQ(s[0], s[1]);
  EXPECT_EQ(predict(f, kAnyRow), 0);
  EXPECT_EQ(argmax_class(std::vector<double>{1, 3, 3}), 1);
}

TEST(PredictScores, MatchesOracleAndPrefixCounts) {
  const Forest f = forest_of({{0.2, 0.8}, {0.7, 0.3}, {0.1, 0.9}});
  const auto s = predict_scores(f, kAnyRow);
  const auto o = oracle::scores({{0.2, 0.8}, {0.7, 0.3}, {0.1, 0.9}});
  for (std::size_t c = 0; c < 2; ++c) EXPECT_TRUE(oracle::close_rel(s[c], o[c]));
  const auto s1 = predict_scores(f, kAnyRow, 1);
  EXPECT_NEAR(s1[0], std::log2(1.2), 1e-15);
  EXPECT_THROW(predict_scores(f, std::vector<double>{0, 0}), DataError);
}

TEST(PredictScores, MonotoneInOnePosterior) {
  for (double q = 0.0; q < 1.0; q += 0.1) {
    const Forest lo = forest_of({{q, 1 - q}, {0.3, 0.7}});
    const Forest hi = forest_of({{q + 0.05, 0.95 - q}, {0.3, 0.7}});
    EXPECT_LE(predict_scores(lo, kAnyRow)[0], predict_scores(hi, kAnyRow)[0]);
  }
}

TEST(TrainForest, XorSingleTreeFitsExactly) {
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.subspace = SubspaceSpec::parse("all");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.master_seed = seed;
    const auto d = xor4();
    const Forest f = train_forest(d, cfg, 1);
    EXPECT_EQ(accuracy(predict(f, d), d.labels()), 1.0) << "seed " << seed;
  }
}

TEST(TrainForest, DeterministicAcrossRunsAndThreads) {
  const auto d = random_dataset(150, 6, 3, 11);
  ForestConfig cfg;
  cfg.n_trees = 3;
  cfg.master_seed = 42;
  const auto a = model_to_json(train_forest(d, cfg, 1));
  const auto b = model_to_json(train_forest(d, cfg, 1));
  EXPECT_EQ(a, b);
  cfg.n_trees = 12;
  EXPECT_EQ(model_to_json(train_forest(d, cfg, 1)),
            model_to_json(train_forest(d, cfg, 5)));
}

TEST(TrainForest, TreeIndependentOfEnsembleSize) {
  const auto d = random_dataset(120, 5, 2, 3);
  ForestConfig small;
  small.n_trees = 2;
  small.master_seed = 9;
  ForestConfig big = small;
  big.n_trees = 7;
  const Forest a = train_forest(d, small, 1);
  const Forest b = train_forest(d, big, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a.trees[k].subspace, b.trees[k].subspace);
    ASSERT_EQ(a.trees[k].hyperplanes.size(), b.trees[k].hyperplanes.size());
    for (std::size_t h = 0; h < a.trees[k].hyperplanes.size(); ++h) {
      EXPECT_EQ(a.trees[k].hyperplanes[h].weights, b.trees[k].hyperplanes[h].weights);
      EXPECT_EQ(a.trees[k].hyperplanes[h].bias, b.trees[k].hyperplanes[h].bias);
    }
  }
}

TEST(TrainForest, SubspaceLargerThanDimensionIsConfigError) {
  const auto d = random_dataset(20, 3, 2, 1);
  ForestConfig cfg;
  cfg.subspace = SubspaceSpec::parse("4");
  EXPECT_THROW(train_forest(d, cfg), UsageError);
  cfg.subspace = SubspaceSpec::parse("all");
  cfg.n_trees = 0;
  EXPECT_THROW(train_forest(d, cfg), UsageError);
  cfg.n_trees = 1;
  cfg.min_samples_split = 1;
  EXPECT_THROW(train_forest(d, cfg), UsageError);
}

TEST(TrainForest, SubspacesAreDistinctSortedAndSized) {
  const auto d = random_dataset(60, 9, 2, 5);
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.subspace = SubspaceSpec::parse("sqrt");
  const Forest f = train_forest(d, cfg, 2);
  EXPECT_EQ(f.subspace_size, 3u);
  bool any_differs = false;
  for (const auto& t : f.trees) {
    const std::vector<std::size_t> fs(t.subspace.indices().begin(),
                                      t.subspace.indices().end());
    ASSERT_EQ(fs.size(), 3u);
    EXPECT_TRUE(std::is_sorted(fs.begin(), fs.end()));
    EXPECT_TRUE(std::adjacent_find(fs.begin(), fs.end()) == fs.end());
    any_differs |= !(t.subspace == f.trees.front().subspace);
  }
  EXPECT_TRUE(any_differs);
}

TEST(TrainForest, SingleClassPredictsThatClass) {
  Dataset d(std::vector<double>{0, 1, 2, 3, 4, 5}, 2, std::vector<ClassId>{1, 1, 1}, 3);
  ForestConfig cfg;
  cfg.n_trees = 4;
  const Forest f = train_forest(d, cfg);
  const auto probe = random_dataset(50, 2, 3, 8, 10.0);
  for (const auto c : predict(f, probe)) EXPECT_EQ(c, 1);
}

TEST(TrainForest, PrefixPredictionsMatchPrefixScores) {
  const auto d = random_dataset(200, 4, 3, 21);
  ForestConfig cfg;
  cfg.n_trees = 9;
  cfg.master_seed = 4;
  const Forest f = train_forest(d, cfg, 3);
  const std::vector<std::size_t> counts{1, 4, 9};
  const auto pre = predict_with_prefixes(f, d, counts, 2);
  for (std::size_t q = 0; q < counts.size(); ++q) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(pre[q][i], predict(f, d.row(i), counts[q]));
    }
  }
  const auto per_tree = predict_per_tree(f, d, 2);
  ASSERT_EQ(per_tree.size(), 9u);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(per_tree[0][i], pre[0][i]);
  }
}

TEST(Margin, Examples) {
  // Ten rows with alternating labels on a forest that always says class 0.
  std::vector<std::vector<double>> rows(10, {0.0});
  std::vector<ClassId> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(i % 2);
  const auto d = make_dataset(rows, labels, 2);
  const Forest f = forest_of({{1, 0}, {0.9, 0.1}});
  const auto m = margin(f, d);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(m.per_sample[i], labels[i] == 0 ? 1 : -1);
  }
  EXPECT_DOUBLE_EQ(m.mean, 0.0);
}

TEST(Accuracy, Basics) {
  const std::vector<ClassId> a{0, 1, 1, 0};
  const std::vector<ClassId> b{0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(accuracy(a, b), 0.75);
  EXPECT_THROW(accuracy(a, std::vector<ClassId>{0}), UsageError);
}

}  // namespace
}  // namespace graf
