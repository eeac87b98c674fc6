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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "graf/error.hpp"

namespace graf {

SubspaceView::SubspaceView(std::vector<std::size_t> indices,
                           std::size_t n_features)
    : indices_(std::move(indices)) {
  if (indices_.empty()) throw UsageError("subspace must not be empty");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw UsageError("subspace has duplicate features");
  }
  if (indices_.back() >= n_features) {
    throw UsageError("subspace feature " + std::to_string(indices_.back()) +
                     " out of range for " + std::to_string(n_features) +
                     " features");
  }
}

SubspaceView SubspaceView::all(std::size_t n_features) {
  std::vector<std::size_t> idx(n_features);
  for (std::size_t j = 0; j < n_features; ++j) idx[j] = j;
  return SubspaceView(std::move(idx), n_features);
}

SubspaceView SubspaceView::sample(std::size_t n_features, std::size_t m,
                                  Rng& rng) {
  if (m == 0 || m > n_features) {
    throw UsageError("subspace size " + std::to_string(m) +
                     " outside [1, " + std::to_string(n_features) + "]");
  }
  return SubspaceView(rng.sample_without_replacement(n_features, m),
                      n_features);
}

void SubspaceView::project(std::span<const double> row,
                           std::span<double> out) const {
  for (std::size_t k = 0; k < indices_.size(); ++k) out[k] = row[indices_[k]];
}

double Hyperplane::score(std::span<const double> x_sub) const {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x_sub[j];
  return s + bias;
}

double Hyperplane::score(std::span<const double> row,
                         const SubspaceView& sub) const {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * row[sub[j]];
  return s + bias;
}

bool PartitionStats::all_constant() const {
  for (std::size_t j = 0; j < min.size(); ++j) {
    if (min[j] != max[j]) return false;
  }
  return true;
}

const char* to_string(PartitionState state) noexcept {
  switch (state) {
    case PartitionState::kImpure:
      return "impure";
    case PartitionState::kPure:
      return "pure";
    case PartitionState::kUnsplittable:
      return "unsplittable";
  }
  return "unknown";
}

PartitionStats partition_stats(const Dataset& data,
                               std::span<const std::size_t> members,
                               const SubspaceView& sub) {
  if (members.empty()) throw UsageError("statistics of an empty partition");
  const std::size_t m = sub.size();
  PartitionStats st{std::vector<double>(m), std::vector<double>(m),
                    std::vector<double>(m, 0.0)};
  for (std::size_t k = 0; k < m; ++k) {
    st.min[k] = st.max[k] = data.at(members[0], sub[k]);
  }
  for (const std::size_t i : members) {
    for (std::size_t k = 0; k < m; ++k) {
      const double v = data.at(i, sub[k]);
      st.min[k] = std::min(st.min[k], v);
      st.max[k] = std::max(st.max[k], v);
      st.mean[k] += v;
    }
  }
  const auto n = static_cast<double>(members.size());
  for (auto& v : st.mean) v /= n;
  return st;
}

double centred_bias(std::span<const double> weights,
                    std::span<const double> mean) {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * mean[j];
  return -s;
}

Hyperplane draw_hyperplane(const PartitionStats& stats, Rng& rng) {
  Hyperplane h;
  h.weights.resize(stats.min.size());
  for (std::size_t j = 0; j < stats.min.size(); ++j) {
    const double lo = stats.min[j];
    const double hi = stats.max[j];
    const double eps = 1e-9 * std::max(1.0, std::abs(hi - lo));
    // A collapsed interval still needs the rng advanced so later draws do
    // not depend on which features happen to be constant.
    const double u = rng.uniform01();
    h.weights[j] = (hi - lo > 2.0 * eps) ? (lo + eps) + u * ((hi - eps) - (lo + eps))
                                         : lo;
  }
  h.bias = centred_bias(h.weights, stats.mean);
  return h;
}

double impurity(std::span<const std::size_t> class_counts,
                std::span<const std::size_t> class_totals) {
  if (class_counts.size() != class_totals.size()) {
    throw UsageError("class count and class total vectors differ in length");
  }
  std::size_t n = 0;
  std::size_t present = 0;
  double sum_r = 0.0;
  double sum_r2 = 0.0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0) continue;
    if (class_totals[c] == 0) {
      throw UsageError("class " + std::to_string(c) +
                       " present in partition but has zero total");
    }
    const double r = static_cast<double>(class_counts[c]) /
                     static_cast<double>(class_totals[c]);
    sum_r += r;
    sum_r2 += r * r;
    n += class_counts[c];
    ++present;
  }
  if (n == 0) throw UsageError("impurity of an empty partition");
  if (present == 1) return 0.0;
  return (1.0 - sum_r2 / (sum_r * sum_r)) * static_cast<double>(n);
}

double impurity(const Dataset& data, std::span<const std::size_t> members) {
  std::vector<std::size_t> counts(data.n_classes(), 0);
  for (const std::size_t i : members) {
    ++counts[static_cast<std::size_t>(data.label(i))];
  }
  return impurity(counts, data.class_totals());
}

std::vector<double> class_posterior(std::span<const std::size_t> class_counts,
                                    std::span<const std::size_t> class_totals) {
  const std::size_t n_classes = class_counts.size();
  std::size_t leaf_size = 0;
  std::size_t total = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    leaf_size += class_counts[c];
    total += class_totals[c];
  }
  std::vector<double> post(n_classes, 0.0);
  if (leaf_size == 0) throw UsageError("posterior of an empty leaf");
  double norm = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_counts[c] == 0) continue;
    if (class_totals[c] == 0) {
      throw UsageError("leaf holds class " + std::to_string(c) +
                       " which has zero total");
    }
    const double frac = static_cast<double>(class_counts[c]) /
                        static_cast<double>(leaf_size);
    const double weight =
        static_cast<double>(total) / static_cast<double>(class_totals[c]);
    post[c] = frac * weight;
    norm += post[c];
  }
  for (auto& p : post) p /= norm;
  return post;
}

void assign_leaf_posteriors(TreeInstance& tree,
                            std::span<const std::size_t> class_totals) {
  for (auto& leaf : tree.leaves) {
    leaf.posterior = class_posterior(leaf.class_counts, class_totals);
  }
}

std::size_t TreeInstance::leaf_index(std::span<const double> row) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    const Hyperplane& h = hyperplanes[static_cast<std::size_t>(n.step)];
    node = n.children[h.score(row, subspace) > 0.0 ? 1 : 0];
  }
  return static_cast<std::size_t>(nodes[static_cast<std::size_t>(node)].leaf);
}

const LeafRecord& TreeInstance::traverse(std::span<const double> row) const {
  return leaves[leaf_index(row)];
}

namespace {

// A partition that is still being worked on.
struct LivePartition {
  std::vector<std::size_t> members;
  std::vector<std::size_t> class_counts;
  double z = 0.0;
  std::size_t created_step = 0;
  int node = 0;
  std::string code;
};

class TreeGrower {
 public:
  TreeGrower(const Dataset& data, const SubspaceView& sub,
             const GrowConfig& config, Rng& rng, GrowTrace* trace)
      : data_(data),
        config_(config),
        rng_(rng),
        trace_(trace),
        m_(sub.size()),
        projected_(data.size() * sub.size()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      sub.project(data.row(i), {projected_.data() + i * m_, m_});
    }
    tree_.subspace = sub;
  }

  TreeInstance run() {
    LivePartition root;
    root.members.resize(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) root.members[i] = i;
    root.class_counts.assign(data_.class_totals().begin(),
                             data_.class_totals().end());
    root.z = impurity(root.class_counts, data_.class_totals());
    tree_.nodes.emplace_back();
    admit(std::move(root), impure_);

    while (!impure_.empty()) {
      const std::size_t target = most_impure();
      const PartitionStats stats = stats_of(impure_[target].members);

      Hyperplane h;
      bool split = false;
      for (std::size_t draw = 0; draw < config_.max_draws; ++draw) {
        h = draw_hyperplane(stats, rng_);
        if (dichotomises(h, impure_[target].members)) {
          split = true;
          break;
        }
        if (trace_) ++trace_->rejected_draws;
      }
      if (!split) {
        if (trace_) ++trace_->exhausted_partitions;
        finalize(std::move(impure_[target]), PartitionState::kUnsplittable);
        impure_.erase(impure_.begin() + static_cast<std::ptrdiff_t>(target));
        continue;
      }

      const std::size_t step = tree_.hyperplanes.size();
      tree_.hyperplanes.push_back(std::move(h));
      apply(step);
    }

    assign_leaf_posteriors(tree_, data_.class_totals());
    return std::move(tree_);
  }

 private:
  std::span<const double> projected_row(std::size_t i) const {
    return {projected_.data() + i * m_, m_};
  }

  PartitionStats stats_of(const std::vector<std::size_t>& members) const {
    PartitionStats st{std::vector<double>(m_), std::vector<double>(m_),
                      std::vector<double>(m_, 0.0)};
    const auto first = projected_row(members.front());
    std::copy(first.begin(), first.end(), st.min.begin());
    std::copy(first.begin(), first.end(), st.max.begin());
    for (const std::size_t i : members) {
      const auto x = projected_row(i);
      for (std::size_t k = 0; k < m_; ++k) {
        st.min[k] = std::min(st.min[k], x[k]);
        st.max[k] = std::max(st.max[k], x[k]);
        st.mean[k] += x[k];
      }
    }
    const auto n = static_cast<double>(members.size());
    for (auto& v : st.mean) v /= n;
    return st;
  }

  bool constant_in_subspace(const std::vector<std::size_t>& members) const {
    const auto first = projected_row(members.front());
    for (const std::size_t i : members) {
      const auto x = projected_row(i);
      for (std::size_t k = 0; k < m_; ++k) {
        if (x[k] != first[k]) return false;
      }
    }
    return true;
  }

  bool dichotomises(const Hyperplane& h,
                    const std::vector<std::size_t>& members) const {
    bool seen[2] = {false, false};
    for (const std::size_t i : members) {
      seen[assign_bit(h, projected_row(i))] = true;
      if (seen[0] && seen[1]) return true;
    }
    return false;
  }

  // Ties on impurity go to the oldest partition, then to list order.
  std::size_t most_impure() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < impure_.size(); ++k) {
      const auto& a = impure_[k];
      const auto& b = impure_[best];
      if (a.z > b.z || (a.z == b.z && a.created_step < b.created_step)) {
        best = k;
      }
    }
    return best;
  }

  // Routes a freshly created partition either to `next` or to a leaf.
  void admit(LivePartition&& part, std::vector<LivePartition>& next) {
    if (part.z == 0.0) {
      finalize(std::move(part), PartitionState::kPure);
    } else if (part.members.size() < config_.min_samples_split ||
               constant_in_subspace(part.members)) {
      finalize(std::move(part), PartitionState::kUnsplittable);
    } else {
      next.push_back(std::move(part));
    }
  }

  void finalize(LivePartition&& part, PartitionState state) {
    LeafRecord leaf;
    leaf.code = std::move(part.code);
    leaf.node = part.node;
    leaf.state = state;
    leaf.created_step = part.created_step;
    leaf.weight_count = tree_.hyperplanes.size();
    leaf.size = part.members.size();
    leaf.class_counts = std::move(part.class_counts);
    leaf.sample_indices = std::move(part.members);
    tree_.nodes[static_cast<std::size_t>(part.node)].leaf =
        static_cast<int>(tree_.leaves.size());
    tree_.leaves.push_back(std::move(leaf));
  }

  void apply(std::size_t step) {
    const Hyperplane& h = tree_.hyperplanes[step];
    std::vector<LivePartition> next;
    next.reserve(impure_.size() * 2);

    for (auto& part : impure_) {
      LivePartition child[2];
      for (const std::size_t i : part.members) {
        child[assign_bit(h, projected_row(i))].members.push_back(i);
      }
      if (child[0].members.empty() || child[1].members.empty()) {
        // Not dichotomised: no bit is emitted for this partition.
        next.push_back(std::move(part));
        continue;
      }

      const auto parent_node = static_cast<std::size_t>(part.node);
      tree_.nodes[parent_node].step = static_cast<int>(step);
      for (int b = 0; b < 2; ++b) {
        auto& c = child[b];
        c.class_counts.assign(data_.n_classes(), 0);
        for (const std::size_t i : c.members) {
          ++c.class_counts[static_cast<std::size_t>(data_.label(i))];
        }
        c.z = impurity(c.class_counts, data_.class_totals());
        c.created_step = step + 1;
        c.code = part.code + static_cast<char>('0' + b);
        c.node = static_cast<int>(tree_.nodes.size());
        TreeNode node;
        node.parent = part.node;
        node.bit = b;
        tree_.nodes.push_back(node);
        tree_.nodes[parent_node].children[b] = c.node;
      }
      if (trace_) {
        trace_->splits.push_back(
            {step, part.members.size(), part.z, {child[0].z, child[1].z}});
      }
      for (auto& c : child) admit(std::move(c), next);
    }

    impure_ = std::move(next);
    if (trace_) {
      std::size_t covered = 0;
      for (const auto& p : impure_) covered += p.members.size();
      for (const auto& leaf : tree_.leaves) covered += leaf.size;
      trace_->covered_after_step.push_back(covered);
    }
  }

  const Dataset& data_;
  const GrowConfig& config_;
  Rng& rng_;
  GrowTrace* trace_;
  std::size_t m_;
  std::vector<double> projected_;
  TreeInstance tree_;
  std::vector<LivePartition> impure_;
};

}  // namespace

TreeInstance grow_tree(const Dataset& data, const SubspaceView& sub,
                       const GrowConfig& config, Rng& rng, GrowTrace* trace) {
  if (data.empty()) throw UsageError("cannot grow a tree on an empty dataset");
  if (config.min_samples_split < 2) {
    throw UsageError("min_samples_split must be at least 2");
  }
  if (config.max_draws == 0) throw UsageError("max_draws must be positive");
  if (sub.size() == 0) throw UsageError("subspace must not be empty");
  if (sub.indices().back() >= data.n_features()) {
    throw UsageError("subspace exceeds dataset dimension");
  }
  return TreeGrower(data, sub, config, rng, trace).run();
}

}  // namespace graf
