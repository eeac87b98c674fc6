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

#include "graf/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graf/error.hpp"
#include "graf/random.hpp"

namespace graf {

namespace {

void check_predictions(const std::vector<std::vector<ClassId>>& rows,
                       std::span<const ClassId> truth, std::size_t n_classes) {
  for (const auto& row : rows) {
    if (row.size() != truth.size()) {
      throw UsageError("prediction row length differs from truth length");
    }
    for (const ClassId c : row) {
      if (c < 0 || static_cast<std::size_t>(c) >= n_classes) {
        throw UsageError("predicted class outside class range");
      }
    }
  }
  for (const ClassId c : truth) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) {
      throw UsageError("true class outside class range");
    }
  }
}

// Per test row, the fraction of rows voting for each class.
std::vector<std::vector<double>> vote_shares(
    const std::vector<std::vector<ClassId>>& rows, std::size_t n_test,
    std::size_t n_classes) {
  std::vector<std::vector<double>> share(n_test,
                                         std::vector<double>(n_classes, 0.0));
  const auto r = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < n_test; ++i) {
      share[i][static_cast<std::size_t>(row[i])] += 1.0;
    }
  }
  for (auto& s : share) {
    for (auto& v : s) v /= r;
  }
  return share;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

// Seeded split into (test, pool) following a random permutation.
void split_test_pool(std::size_t n, std::size_t test_size, std::uint64_t seed,
                     std::vector<std::size_t>& test,
                     std::vector<std::size_t>& pool) {
  Rng rng(derive_seed(seed, 0));
  auto perm = rng.sample_without_replacement(n, n);
  if (test_size == 0) test_size = n / 2;
  if (test_size >= n) throw UsageError("test set would leave no training pool");
  test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_size));
  pool.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_size), perm.end());
}

std::vector<std::size_t> draw_from_pool(const std::vector<std::size_t>& pool,
                                        std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(pool.size(), count);
  std::vector<std::size_t> rows(picks.size());
  for (std::size_t k = 0; k < picks.size(); ++k) rows[k] = pool[picks[k]];
  return rows;
}

}  // namespace

BVResult kw_decompose(const std::vector<std::vector<ClassId>>& predictions,
                      std::span<const ClassId> truth, std::size_t n_classes) {
  if (predictions.size() < 2) {
    throw UsageError("bias-variance decomposition needs at least two models");
  }
  if (truth.empty()) throw UsageError("bias-variance needs a non-empty test set");
  check_predictions(predictions, truth, n_classes);

  const std::size_t n_test = truth.size();
  const auto r = static_cast<double>(predictions.size());
  const auto p = vote_shares(predictions, n_test, n_classes);

  double bias_sum = 0.0;
  double p2_sum = 0.0;
  for (std::size_t i = 0; i < n_test; ++i) {
    for (std::size_t j = 0; j < n_classes; ++j) {
      const double target = static_cast<std::size_t>(truth[i]) == j ? 1.0 : 0.0;
      const double pij = p[i][j];
      bias_sum += (target - pij) * (target - pij) - pij * (1.0 - pij) / (r - 1.0);
      p2_sum += pij * pij;
    }
  }

  double err_sum = 0.0;
  for (const auto& row : predictions) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_test; ++i) hits += row[i] == truth[i] ? 1 : 0;
    err_sum += 1.0 - static_cast<double>(hits) / static_cast<double>(n_test);
  }

  BVResult out;
  const auto nt = static_cast<double>(n_test);
  out.bias2 = bias_sum / nt;
  out.variance = 1.0 - p2_sum / nt;
  out.err = err_sum / r;
  out.models = predictions.size();
  out.test_size = n_test;
  out.bias2_negative = out.bias2 < -1e-12;
  return out;
}

SCResult strength_correlation(const std::vector<std::vector<ClassId>>& per_tree,
                              std::span<const ClassId> truth,
                              std::size_t n_classes) {
  if (per_tree.size() < 2) {
    throw UsageError("strength/correlation needs at least two trees");
  }
  if (truth.empty()) throw UsageError("strength/correlation needs test rows");
  check_predictions(per_tree, truth, n_classes);

  const std::size_t n_test = truth.size();
  const auto share = vote_shares(per_tree, n_test, n_classes);

  // Margin per row and the most-voted wrong class (ties: smallest id).
  std::vector<double> margin(n_test);
  std::vector<ClassId> runner_up(n_test, -1);
  for (std::size_t i = 0; i < n_test; ++i) {
    const auto y = static_cast<std::size_t>(truth[i]);
    double best = -1.0;
    for (std::size_t j = 0; j < n_classes; ++j) {
      if (j == y) continue;
      if (share[i][j] > best) {
        best = share[i][j];
        runner_up[i] = static_cast<ClassId>(j);
      }
    }
    // A single-class problem has no wrong class to compete with.
    margin[i] = share[i][y] - (runner_up[i] < 0 ? 0.0 : best);
  }

  const auto nt = static_cast<double>(n_test);
  double sd = 0.0;
  for (const auto& tree : per_tree) {
    std::size_t acc_hits = 0;
    std::size_t sec_hits = 0;
    for (std::size_t i = 0; i < n_test; ++i) {
      acc_hits += tree[i] == truth[i] ? 1 : 0;
      sec_hits += tree[i] == runner_up[i] ? 1 : 0;
    }
    const double acc = static_cast<double>(acc_hits) / nt;
    const double sec = static_cast<double>(sec_hits) / nt;
    sd += std::sqrt(std::max(0.0, acc + sec - acc * acc - sec * sec));
  }
  sd /= static_cast<double>(per_tree.size());

  double s = 0.0;
  for (const double m : margin) s += m;
  s /= nt;
  // Var(p) as the mean squared deviation: equal to mean(p^2) - s^2 but
  // never negative after rounding.
  double var_p = 0.0;
  for (const double m : margin) var_p += (m - s) * (m - s);
  var_p /= nt;

  SCResult out;
  out.strength = s;
  out.sd = sd;
  if (sd > 0.0) {
    out.correlation = var_p / (sd * sd);
    out.correlation_defined = true;
  } else {
    out.correlation = std::numeric_limits<double>::quiet_NaN();
  }
  if (out.correlation_defined && s > 0.0) {
    out.pe_bound = out.correlation * (1.0 - s * s) / (s * s);
    out.pe_bound_defined = true;
  } else {
    out.pe_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("spearman inputs differ in length");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(va * vb);
}

std::vector<std::size_t> stratified_folds(std::span<const ClassId> labels,
                                          std::size_t n_classes, std::size_t k,
                                          std::uint64_t seed) {
  if (k == 0) throw UsageError("fold count must be positive");
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t deal = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (const std::size_t i : members) fold[i] = deal++ % k;
  }
  return fold;
}

CvGrid CvGrid::defaults() {
  CvGrid g;
  g.n_trees = {100, 200, 500, 1000, 2000};
  g.subspaces = {{SubspaceRule::kLog2, 0},
                 {SubspaceRule::kSqrt, 0},
                 {SubspaceRule::kHalf, 0},
                 {SubspaceRule::kAll, 0}};
  g.min_samples_split = {2, 3, 4, 5};
  return g;
}

CvReport cv_protocol(const Dataset& data, const CvGrid& grid,
                     const CvOptions& options) {
  if (grid.size() == 0) throw UsageError("hyper-parameter grid is empty");
  if (options.outer_folds < 2 || options.inner_folds < 2) {
    throw UsageError("cross-validation needs at least two folds");
  }
  if (data.size() < options.outer_folds) {
    throw UsageError("fewer rows than outer folds");
  }
  for (const auto& s : grid.subspaces) s.resolve(data.n_features());
  for (const auto l : grid.n_trees) {
    if (l == 0) throw UsageError("tree count must be positive");
  }
  const std::size_t max_trees =
      *std::max_element(grid.n_trees.begin(), grid.n_trees.end());

  CvReport report;
  const auto outer = stratified_folds(data.labels(), data.n_classes(),
                                      options.outer_folds,
                                      derive_seed(options.seed, 0));

  for (std::size_t f = 0; f < options.outer_folds; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (outer[i] == f ? test_rows : train_rows).push_back(i);
    }
    const Dataset train = data.subset(train_rows);
    const Dataset test = data.subset(test_rows);
    for (std::size_t c = 0; c < data.n_classes(); ++c) {
      if (data.class_totals()[c] == 0) continue;
      if (test.class_totals()[c] == 0) {
        report.warnings.push_back("class '" + data.class_labels()[c] +
                                  "' absent from test split of fold " +
                                  std::to_string(f));
      }
    }

    // Pooled inner accuracy per grid point, indexed [subspace][split][trees].
    const std::size_t n_points = grid.size();
    std::vector<std::size_t> hits(n_points, 0);
    std::size_t tested = 0;
    const auto inner = stratified_folds(train.labels(), train.n_classes(),
                                        options.inner_folds,
                                        derive_seed(options.seed, 1, f));
    for (std::size_t g = 0; g < options.inner_folds; ++g) {
      std::vector<std::size_t> fit_rows;
      std::vector<std::size_t> val_rows;
      for (std::size_t i = 0; i < train.size(); ++i) {
        (inner[i] == g ? val_rows : fit_rows).push_back(i);
      }
      if (fit_rows.empty() || val_rows.empty()) continue;
      const Dataset fit = train.subset(fit_rows);
      const Dataset val = train.subset(val_rows);
      tested += val.size();
      for (std::size_t a = 0; a < grid.subspaces.size(); ++a) {
        for (std::size_t b = 0; b < grid.min_samples_split.size(); ++b) {
          ForestConfig cfg;
          cfg.n_trees = max_trees;
          cfg.subspace = grid.subspaces[a];
          cfg.min_samples_split = grid.min_samples_split[b];
          cfg.master_seed = derive_seed(derive_seed(options.seed, 2, f), g);
          const Forest forest = train_forest(fit, cfg, options.threads);
          const auto preds = predict_with_prefixes(forest, val, grid.n_trees,
                                                   options.threads);
          for (std::size_t q = 0; q < grid.n_trees.size(); ++q) {
            std::size_t h = 0;
            for (std::size_t i = 0; i < val.size(); ++i) {
              h += preds[q][i] == val.label(i) ? 1 : 0;
            }
            hits[(q * grid.subspaces.size() + a) * grid.min_samples_split.size() +
                 b] += h;
          }
        }
      }
    }

    std::size_t best = 0;
    for (std::size_t p = 1; p < n_points; ++p) {
      if (hits[p] > hits[best]) best = p;
    }
    const std::size_t b = best % grid.min_samples_split.size();
    const std::size_t a = (best / grid.min_samples_split.size()) %
                          grid.subspaces.size();
    const std::size_t q = best / (grid.min_samples_split.size() *
                                  grid.subspaces.size());

    CvFold fold;
    fold.fold = f;
    fold.train_size = train.size();
    fold.test_size = test.size();
    fold.n_trees = grid.n_trees[q];
    fold.subspace = grid.subspaces[a];
    fold.min_samples_split = grid.min_samples_split[b];
    fold.inner_accuracy = tested == 0 ? 0.0
                                      : static_cast<double>(hits[best]) /
                                            static_cast<double>(tested);

    ForestConfig cfg;
    cfg.n_trees = fold.n_trees;
    cfg.subspace = fold.subspace;
    cfg.min_samples_split = fold.min_samples_split;
    cfg.master_seed = derive_seed(options.seed, 3, f);
    const Forest forest = train_forest(train, cfg, options.threads);
    fold.test_accuracy = accuracy(predict(forest, test, options.threads),
                                  test.labels());
    report.folds.push_back(fold);
  }

  double sum = 0.0;
  for (const auto& f : report.folds) sum += f.test_accuracy;
  report.mean_accuracy = sum / static_cast<double>(report.folds.size());
  return report;
}

std::vector<BvRow> bias_variance_experiment(const Dataset& data,
                                            const BvConfig& config) {
  if (config.models < 2) throw UsageError("bias-variance needs at least two models");
  if (config.train_sizes.empty() || config.tree_counts.empty() ||
      config.subspaces.empty()) {
    throw UsageError("bias-variance sweep has an empty axis");
  }
  std::vector<std::size_t> test_rows;
  std::vector<std::size_t> pool;
  split_test_pool(data.size(), config.test_size, config.seed, test_rows, pool);
  for (const auto ts : config.train_sizes) {
    if (ts == 0 || ts > pool.size()) {
      throw UsageError("train size " + std::to_string(ts) +
                       " outside [1, " + std::to_string(pool.size()) + "]");
    }
  }
  for (const auto l : config.tree_counts) {
    if (l == 0) throw UsageError("tree count must be positive");
  }
  for (const auto& s : config.subspaces) s.resolve(data.n_features());
  const Dataset test = data.subset(test_rows);
  const std::size_t max_trees =
      *std::max_element(config.tree_counts.begin(), config.tree_counts.end());

  std::vector<BvRow> rows;
  for (const std::size_t ts : config.train_sizes) {
    for (const auto& sub : config.subspaces) {
      // preds[q][r] for tree count q and model r.
      std::vector<std::vector<std::vector<ClassId>>> preds(
          config.tree_counts.size(),
          std::vector<std::vector<ClassId>>(config.models));
      for (std::size_t r = 0; r < config.models; ++r) {
        const Dataset train =
            data.subset(draw_from_pool(pool, ts, derive_seed(derive_seed(config.seed, 1, ts), r)));
        ForestConfig cfg;
        cfg.n_trees = max_trees;
        cfg.subspace = sub;
        cfg.min_samples_split = config.min_samples_split;
        cfg.master_seed = derive_seed(config.seed, 2, r);
        const Forest forest = train_forest(train, cfg, config.threads);
        auto by_count = predict_with_prefixes(forest, test, config.tree_counts,
                                              config.threads);
        for (std::size_t q = 0; q < by_count.size(); ++q) {
          preds[q][r] = std::move(by_count[q]);
        }
      }
      for (std::size_t q = 0; q < config.tree_counts.size(); ++q) {
        BvRow row;
        row.train_size = ts;
        row.n_trees = config.tree_counts[q];
        row.subspace = sub.to_string();
        row.subspace_size = sub.resolve(data.n_features());
        row.result = kw_decompose(preds[q], test.labels(), data.n_classes());
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<ScRow> strength_correlation_experiment(const Dataset& data,
                                                   const ScConfig& config) {
  if (config.models == 0) throw UsageError("need at least one model");
  if (config.n_trees < 2) throw UsageError("strength/correlation needs >= 2 trees");
  if (config.subspace_sizes.empty()) throw UsageError("no subspace sizes given");
  std::vector<std::size_t> test_rows;
  std::vector<std::size_t> pool;
  split_test_pool(data.size(), config.test_size, config.seed, test_rows, pool);
  const std::size_t ts = config.train_size == 0 ? pool.size() : config.train_size;
  if (ts > pool.size()) throw UsageError("train size exceeds training pool");
  const Dataset test = data.subset(test_rows);

  std::vector<ScRow> rows;
  for (const std::size_t m : config.subspace_sizes) {
    SubspaceSpec sub{SubspaceRule::kFixed, m};
    sub.resolve(data.n_features());
    ScRow row;
    row.subspace_size = m;
    row.models = config.models;
    row.result.correlation_defined = true;
    double s_sum = 0.0;
    double rho_sum = 0.0;
    double sd_sum = 0.0;
    double acc_sum = 0.0;
    for (std::size_t r = 0; r < config.models; ++r) {
      const Dataset train = data.subset(
          draw_from_pool(pool, ts, derive_seed(config.seed, 1, r)));
      ForestConfig cfg;
      cfg.n_trees = config.n_trees;
      cfg.subspace = sub;
      cfg.min_samples_split = config.min_samples_split;
      cfg.master_seed = derive_seed(config.seed, 2, r);
      const Forest forest = train_forest(train, cfg, config.threads);
      const auto per_tree = predict_per_tree(forest, test, config.threads);
      const SCResult sc = strength_correlation(per_tree, test.labels(),
                                               data.n_classes());
      s_sum += sc.strength;
      sd_sum += sc.sd;
      if (sc.correlation_defined) {
        rho_sum += sc.correlation;
      } else {
        row.result.correlation_defined = false;
      }
      acc_sum += accuracy(predict(forest, test, config.threads), test.labels());
    }
    const auto r = static_cast<double>(config.models);
    row.result.strength = s_sum / r;
    row.result.sd = sd_sum / r;
    row.test_accuracy = acc_sum / r;
    const double s = row.result.strength;
    if (row.result.correlation_defined) {
      row.result.correlation = rho_sum / r;
      if (s > 0.0) {
        row.result.pe_bound = row.result.correlation * (1.0 - s * s) / (s * s);
        row.result.pe_bound_defined = true;
      }
    }
    if (!row.result.correlation_defined) {
      row.result.correlation = std::numeric_limits<double>::quiet_NaN();
    }
    if (!row.result.pe_bound_defined) {
      row.result.pe_bound = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace graf
