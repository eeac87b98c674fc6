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

#include "graf/partition_engine.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "brute_force.hpp"
#include "graf/error.hpp"
#include "test_support.hpp"

namespace graf {
namespace {

using testing::make_dataset;
using testing::random_dataset;

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

TEST(PartitionStats, TwoPoints) {
  const auto d = make_dataset({{0, 2}, {4, 6}}, {0, 1}, 2);
  const auto st = partition_stats(d, all_rows(d), SubspaceView::all(2));
  EXPECT_EQ(st.min, (std::vector<double>{0, 2}));
  EXPECT_EQ(st.max, (std::vector<double>{4, 6}));
  EXPECT_EQ(st.mean, (std::vector<double>{2, 4}));
}

TEST(PartitionStats, Singleton) {
  const auto d = make_dataset({{3, 3}}, {0}, 1);
  const auto st = partition_stats(d, all_rows(d), SubspaceView::all(2));
  EXPECT_EQ(st.min, st.max);
  EXPECT_EQ(st.mean, (std::vector<double>{3, 3}));
  EXPECT_TRUE(st.all_constant());
}

TEST(PartitionStats, ConstantFeature) {
  const auto d = make_dataset({{1, 1}, {1, 5}, {1, 9}}, {0, 1, 0}, 2);
  const auto st = partition_stats(d, all_rows(d), SubspaceView::all(2));
  EXPECT_EQ(st.min, (std::vector<double>{1, 1}));
  EXPECT_EQ(st.max, (std::vector<double>{1, 9}));
  EXPECT_EQ(st.mean, (std::vector<double>{1, 5}));
  EXPECT_FALSE(st.all_constant());
}

TEST(PartitionStats, RestrictsToSubspace) {
  const auto d = make_dataset({{0, 10, 2}, {4, 20, 6}}, {0, 1}, 2);
  const SubspaceView sub({2, 0}, 3);
  const auto st = partition_stats(d, all_rows(d), sub);
  EXPECT_EQ(st.min, (std::vector<double>{0, 2}));
  EXPECT_EQ(st.max, (std::vector<double>{4, 6}));
}

TEST(PartitionStats, EmptyPartitionIsUsageError) {
  const auto d = make_dataset({{0, 2}}, {0}, 1);
  EXPECT_THROW(partition_stats(d, {}, SubspaceView::all(2)), UsageError);
}

TEST(SubspaceView, RejectsDuplicatesAndOutOfRange) {
  EXPECT_THROW(SubspaceView({1, 1}, 3), UsageError);
  EXPECT_THROW(SubspaceView({3}, 3), UsageError);
  EXPECT_THROW(SubspaceView({}, 3), UsageError);
  Rng rng(1);
  const auto s = SubspaceView::sample(10, 4, rng);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(std::is_sorted(s.indices().begin(), s.indices().end()));
}

TEST(DrawHyperplane, BiasCentresTheMean) {
  EXPECT_DOUBLE_EQ(centred_bias(std::vector<double>{0.4, 0.7},
                                std::vector<double>{0.5, 0.5}),
                   -0.55);
  EXPECT_DOUBLE_EQ(centred_bias(std::vector<double>{2, 1},
                                std::vector<double>{0.5, 1}),
                   -2.0);
}

TEST(DrawHyperplane, ConstantFeaturesTakeTheMinimum) {
  PartitionStats st{{3, 3}, {3, 3}, {3, 3}};
  Rng rng(5);
  const auto h = draw_hyperplane(st, rng);
  EXPECT_EQ(h.weights, (std::vector<double>{3, 3}));
  EXPECT_DOUBLE_EQ(h.bias, -18.0);
  EXPECT_EQ(assign_bit(h, std::vector<double>{3, 3}), 0);
}

TEST(DrawHyperplane, WeightsInsideOpenRangeAndBiasMatches) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    PartitionStats st;
    for (int j = 0; j < 4; ++j) {
      const double a = rng.uniform(-5, 5);
      const double b = a + rng.uniform(0, 3);
      st.min.push_back(a);
      st.max.push_back(b);
      st.mean.push_back(rng.uniform(a, b));
    }
    const auto h = draw_hyperplane(st, rng);
    long double expect = 0;
    for (int j = 0; j < 4; ++j) {
      EXPECT_GT(h.weights[j], st.min[j]);
      EXPECT_LT(h.weights[j], st.max[j]);
      expect -= static_cast<long double>(h.weights[j]) * st.mean[j];
    }
    EXPECT_LE(std::fabs(h.bias - static_cast<double>(expect)),
              1e-9 * std::max(1.0, std::fabs(h.bias)));
    // The partition centroid sits exactly on the zero level set.
    EXPECT_EQ(assign_bit(h, st.mean), 0);
  }
}

TEST(AssignBit, StrictInequality) {
  const Hyperplane h{{1, 0}, -0.5};
  EXPECT_EQ(assign_bit(h, std::vector<double>{1, 7}), 1);
  EXPECT_EQ(assign_bit(h, std::vector<double>{0.5, 7}), 0);
  const Hyperplane g{{2, 1}, -2};
  EXPECT_EQ(assign_bit(g, std::vector<double>{0.5, 1}), 0);
}

TEST(Impurity, Examples) {
  const std::vector<std::size_t> totals{100, 100};
  EXPECT_EQ(impurity(std::vector<std::size_t>{10, 0}, totals), 0.0);
  EXPECT_NEAR(impurity(std::vector<std::size_t>{10, 10}, totals), 10.0, 1e-12);
  EXPECT_NEAR(impurity(std::vector<std::size_t>{30, 10}, totals), 15.0, 1e-12);
}

TEST(Impurity, Errors) {
  EXPECT_THROW(impurity(std::vector<std::size_t>{0, 0},
                        std::vector<std::size_t>{1, 1}),
               UsageError);
  EXPECT_THROW(impurity(std::vector<std::size_t>{1, 1},
                        std::vector<std::size_t>{1, 0}),
               UsageError);
}

TEST(Impurity, MatchesOracleOnRandomPartitions) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + static_cast<int>(rng.uniform_index(4));
    const auto d = random_dataset(5 + rng.uniform_index(60), 1,
                                  static_cast<std::size_t>(classes), rng.next_u64());
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (rng.uniform01() < 0.5) members.push_back(i);
    }
    if (members.empty()) members.push_back(0);
    std::vector<int> part_labels, all_labels;
    for (auto i : members) part_labels.push_back(d.label(i));
    for (auto y : d.labels()) all_labels.push_back(y);
    const double got = impurity(d, members);
    EXPECT_TRUE(oracle::close_rel(got, oracle::impurity(part_labels, all_labels, classes)))
        << got;
    EXPECT_GE(got, 0.0);
  }
}

TEST(ClassPosterior, Examples) {
  EXPECT_EQ(class_posterior(std::vector<std::size_t>{5, 0},
                            std::vector<std::size_t>{10, 90}),
            (std::vector<double>{1, 0}));
  const auto p = class_posterior(std::vector<std::size_t>{1, 1},
                                 std::vector<std::size_t>{80, 20});
  EXPECT_NEAR(p[0], 0.2, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  const auto q = class_posterior(std::vector<std::size_t>{3, 7},
                                 std::vector<std::size_t>{50, 50});
  EXPECT_NEAR(q[0], 0.3, 1e-15);
  EXPECT_NEAR(q[1], 0.7, 1e-15);
}

TEST(GrowTree, XorFourIsSolved) {
  const auto d = testing::xor4();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto tree = grow_tree(d, SubspaceView::all(2), {}, rng);
    // The first centred cut leaves one point of each class on either side,
    // and a cut centred on one side cannot split the mirrored other side.
    EXPECT_EQ(tree.hyperplanes.size(), 3u) << "seed " << seed;
    for (const auto& leaf : tree.leaves) {
      EXPECT_EQ(leaf.state, PartitionState::kPure);
      EXPECT_EQ(std::count_if(leaf.class_counts.begin(), leaf.class_counts.end(),
                              [](auto c) { return c > 0; }),
                1);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& post = tree.traverse(d.row(i)).posterior;
      EXPECT_EQ(post[static_cast<std::size_t>(d.label(i))], 1.0);
    }
  }
}

TEST(GrowTree, SingleClassHasNoHyperplanes) {
  const auto d = make_dataset({{0, 1}, {2, 3}, {5, 1}}, {1, 1, 1}, 2);
  Rng rng(1);
  const auto tree = grow_tree(d, SubspaceView::all(2), {}, rng);
  EXPECT_TRUE(tree.hyperplanes.empty());
  ASSERT_EQ(tree.leaves.size(), 1u);
  EXPECT_EQ(tree.leaves[0].posterior, (std::vector<double>{0, 1}));
  EXPECT_EQ(tree.leaves[0].weight_count, 0u);
  EXPECT_EQ(tree.leaves[0].code, "");
}

TEST(GrowTree, ConflictingDuplicatesAreUnsplittable) {
  const auto d = make_dataset({{1, 2}, {1, 2}}, {0, 1}, 2);
  Rng rng(1);
  const auto tree = grow_tree(d, SubspaceView::all(2), {}, rng);
  ASSERT_EQ(tree.leaves.size(), 1u);
  EXPECT_EQ(tree.leaves[0].state, PartitionState::kUnsplittable);
  EXPECT_EQ(tree.leaves[0].size, 2u);
  EXPECT_NEAR(tree.leaves[0].posterior[0], 0.5, 1e-15);
}

TEST(GrowTree, MinSamplesSplitStopsSmallPartitions) {
  const auto d = random_dataset(200, 3, 2, 8);
  GrowConfig cfg;
  cfg.min_samples_split = 5;
  Rng rng(8);
  const auto tree = grow_tree(d, SubspaceView::all(3), cfg, rng);
  for (const auto& leaf : tree.leaves) {
    const bool mixed = std::count_if(leaf.class_counts.begin(), leaf.class_counts.end(),
                                     [](auto c) { return c > 0; }) > 1;
    if (mixed) {
      EXPECT_EQ(leaf.state, PartitionState::kUnsplittable);
      EXPECT_LT(leaf.size, 5u);
    }
  }
}

TEST(GrowTree, PreconditionErrors) {
  const auto d = testing::xor4();
  Rng rng(1);
  GrowConfig cfg;
  cfg.min_samples_split = 1;
  EXPECT_THROW(grow_tree(d, SubspaceView::all(2), cfg, rng), UsageError);
  EXPECT_THROW(grow_tree(Dataset(), SubspaceView::all(2), {}, rng), UsageError);
  EXPECT_THROW(make_dataset({{0, NAN}}, {0}, 1), DataError);
}

// Structural invariants on many random trees.
TEST(GrowTree, StructuralInvariants) {
  Rng meta(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + meta.uniform_index(200);
    const std::size_t d = 1 + meta.uniform_index(6);
    const std::size_t c = 2 + meta.uniform_index(3);
    const auto data = random_dataset(n, d, c, meta.next_u64());
    Rng rng(meta.next_u64());
    const auto sub = SubspaceView::sample(d, 1 + meta.uniform_index(d), rng);
    GrowTrace trace;
    const auto tree = grow_tree(data, sub, {}, rng, &trace);

    EXPECT_LE(tree.leaves.size(), n);
    EXPECT_LE(tree.hyperplanes.size(), n - 1);
    for (auto covered : trace.covered_after_step) EXPECT_EQ(covered, n);

    // Leaves partition the rows.
    std::vector<int> owner(n, -1);
    for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
      for (auto i : tree.leaves[l].sample_indices) {
        EXPECT_EQ(owner[i], -1);
        owner[i] = static_cast<int>(l);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NE(owner[i], -1);
      // Traversal consistency.
      EXPECT_EQ(tree.leaf_index(data.row(i)), static_cast<std::size_t>(owner[i]));
    }

    std::set<std::string> codes;
    for (const auto& leaf : tree.leaves) {
      EXPECT_NE(leaf.state, PartitionState::kImpure);
      EXPECT_NEAR(std::accumulate(leaf.posterior.begin(), leaf.posterior.end(), 0.0),
                  1.0, 1e-9);
      EXPECT_GE(leaf.weight_count, leaf.created_step);
      // Code is the bit sequence along the node path; steps increase.
      std::string path;
      int prev_step = std::numeric_limits<int>::max();
      for (int node = leaf.node; tree.nodes[static_cast<std::size_t>(node)].parent >= 0;
           node = tree.nodes[static_cast<std::size_t>(node)].parent) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        const auto& parent = tree.nodes[static_cast<std::size_t>(nd.parent)];
        EXPECT_LT(parent.step, prev_step);
        prev_step = parent.step;
        path.insert(path.begin(), static_cast<char>('0' + nd.bit));
      }
      EXPECT_EQ(path, leaf.code);
      codes.insert(leaf.code);
    }
    EXPECT_EQ(codes.size(), tree.leaves.size());
    // Prefix-free: two leaves diverge at the first differing step.
    for (const auto& a : codes) {
      for (const auto& b : codes) {
        if (a != b) EXPECT_FALSE(b.compare(0, a.size(), a) == 0 && b.size() > a.size());
      }
    }

    // Leaves with distinct rows are pure when splitting is unrestricted.
    for (const auto& leaf : tree.leaves) {
      if (leaf.state == PartitionState::kUnsplittable) {
        EXPECT_GT(trace.exhausted_partitions, 0u);
      }
    }
  }
}

TEST(Traverse, SingleLeafAndBoundary) {
  TreeInstance tree;
  tree.subspace = SubspaceView::all(2);
  tree.hyperplanes.push_back({{1, 0}, -0.5});
  tree.nodes.resize(3);
  tree.nodes[0].step = 0;
  tree.nodes[0].children[0] = 1;
  tree.nodes[0].children[1] = 2;
  tree.nodes[1] = {0, 0, -1, {-1, -1}, 0};
  tree.nodes[2] = {0, 1, -1, {-1, -1}, 1};
  tree.leaves.resize(2);
  tree.leaves[0].code = "0";
  tree.leaves[1].code = "1";
  EXPECT_EQ(tree.traverse(std::vector<double>{0.5, 3}).code, "0");
  EXPECT_EQ(tree.traverse(std::vector<double>{0.6, 3}).code, "1");

  TreeInstance single;
  single.subspace = SubspaceView::all(2);
  single.nodes.resize(1);
  single.nodes[0].leaf = 0;
  single.leaves.resize(1);
  EXPECT_EQ(single.leaf_index(std::vector<double>{1e6, -1e6}), 0u);
}

TEST(GrowTree, DeterministicForFixedSeed) {
  const auto d = random_dataset(300, 4, 3, 17);
  Rng a(5), b(5);
  const auto ta = grow_tree(d, SubspaceView::all(4), {}, a);
  const auto tb = grow_tree(d, SubspaceView::all(4), {}, b);
  ASSERT_EQ(ta.hyperplanes.size(), tb.hyperplanes.size());
  for (std::size_t k = 0; k < ta.hyperplanes.size(); ++k) {
    EXPECT_EQ(ta.hyperplanes[k].weights, tb.hyperplanes[k].weights);
    EXPECT_EQ(ta.hyperplanes[k].bias, tb.hyperplanes[k].bias);
  }
}

}  // namespace
}  // namespace graf
