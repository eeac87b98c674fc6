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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "graf/csv.hpp"
#include "graf/datagen.hpp"
#include "graf/error.hpp"
#include "graf/evalsuite.hpp"
#include "graf/forest.hpp"
#include "graf/model_io.hpp"
#include "graf/parallel.hpp"
#include "graf/sensitivity.hpp"
#include "json.hpp"

namespace graf::cli {

namespace {

std::size_t parse_size(const std::string& text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw UsageError("expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::string number_or_nan(double v, bool defined) {
  return defined ? format_double(v) : "nan";
}

unsigned resolve_threads(int flag) {
  if (flag < 0) throw UsageError("--threads must be non-negative");
  return flag == 0 ? default_thread_count() : static_cast<unsigned>(flag);
}

// Options shared by several subcommands.
struct Common {
  std::string data;
  std::string label = "label";
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_threads(CLI::App* sub, Common& c) {
  sub->add_option("--threads", c.threads,
                  "Worker threads (0 = GRAF_THREADS or hardware count)");
}

// ---- commands ---------------------------------------------------------------

struct TrainArgs {
  Common c;
  std::size_t trees = 100;
  std::string subspace = "sqrt";
  std::size_t min_split = 2;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Dataset data = load_csv(a.c.data, a.c.label);
  ForestConfig cfg;
  cfg.n_trees = a.trees;
  cfg.subspace = SubspaceSpec::parse(a.subspace);
  cfg.min_samples_split = a.min_split;
  cfg.master_seed = a.c.seed;
  const unsigned threads = resolve_threads(a.c.threads);
  const Forest forest = train_forest(data, cfg, threads);
  save_model(forest, a.c.out);
  const double acc = accuracy(predict(forest, data, threads), data.labels());
  out << "trained " << forest.trees.size() << " trees on " << data.size()
      << " rows (" << data.n_features() << " features, " << data.n_classes()
      << " classes, subspace " << forest.subspace_size << ")\n";
  out << "train_accuracy=" << fixed6(acc) << "\n";
  return kSuccess;
}

struct PredictArgs {
  Common c;
  std::string model;
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  const Forest forest = load_model(a.model);
  const CsvData csv = read_csv_data(a.c.data, a.c.label, false);
  if (csv.feature_names.size() != forest.n_features) {
    throw DataError("dimension mismatch: '" + a.c.data + "' has " +
                    std::to_string(csv.feature_names.size()) +
                    " feature columns, model expects " +
                    std::to_string(forest.n_features));
  }
  const unsigned threads = resolve_threads(a.c.threads);
  std::vector<std::vector<double>> scores(csv.n_rows);
  const std::size_t d = forest.n_features;
  parallel_for(csv.n_rows, threads, [&](std::size_t i) {
    scores[i] = predict_scores(
        forest, std::span<const double>(csv.features.data() + i * d, d));
  });

  std::ostringstream table;
  std::vector<std::string> header{"index", "predicted"};
  for (const auto& name : forest.class_labels) header.push_back("score_" + name);
  write_csv_row(table, header);
  std::vector<ClassId> predicted(csv.n_rows);
  for (std::size_t i = 0; i < csv.n_rows; ++i) {
    predicted[i] = argmax_class(scores[i]);
    std::vector<std::string> row{
        std::to_string(i),
        forest.class_labels[static_cast<std::size_t>(predicted[i])]};
    for (const double s : scores[i]) row.push_back(format_double(s));
    write_csv_row(table, row);
  }
  write_text_file(a.c.out, table.str());
  out << "predicted " << csv.n_rows << " rows\n";
  if (csv.has_labels) {
    const Dataset truth = to_dataset(csv, forest.class_labels);
    out << "accuracy=" << fixed6(accuracy(predicted, truth.labels())) << "\n";
  }
  return kSuccess;
}

struct CvArgs {
  Common c;
  bool grid_default = false;
  std::string trees_grid;
  std::string subspace_grid;
  std::string min_split_grid;
  std::size_t outer = 4;
  std::size_t inner = 5;
};

int cmd_eval_cv(const CvArgs& a, std::ostream& out) {
  const bool custom = !a.trees_grid.empty() || !a.subspace_grid.empty() ||
                      !a.min_split_grid.empty();
  if (a.grid_default && custom) {
    throw UsageError("--grid-default cannot be combined with explicit grids");
  }
  CvGrid grid = CvGrid::defaults();
  if (!a.trees_grid.empty()) grid.n_trees = parse_size_list(a.trees_grid);
  if (!a.subspace_grid.empty()) {
    grid.subspaces.clear();
    for (const auto& s : split(a.subspace_grid, ',')) {
      grid.subspaces.push_back(SubspaceSpec::parse(s));
    }
  }
  if (!a.min_split_grid.empty()) {
    grid.min_samples_split = parse_size_list(a.min_split_grid);
  }
  for (const auto s : grid.min_samples_split) {
    if (s < 2) throw UsageError("min split values must be at least 2");
  }

  const Dataset data = load_csv(a.c.data, a.c.label);
  CvOptions opt;
  opt.outer_folds = a.outer;
  opt.inner_folds = a.inner;
  opt.seed = a.c.seed;
  opt.threads = resolve_threads(a.c.threads);
  const CvReport report = cv_protocol(data, grid, opt);

  nlohmann::json doc;
  doc["seed"] = a.c.seed;
  doc["outer_folds"] = a.outer;
  doc["inner_folds"] = a.inner;
  doc["grid"] = {{"n_trees", grid.n_trees},
                 {"min_samples_split", grid.min_samples_split}};
  for (const auto& s : grid.subspaces) doc["grid"]["subspace"].push_back(s.to_string());
  doc["folds"] = nlohmann::json::array();
  for (const auto& f : report.folds) {
    doc["folds"].push_back({{"fold", f.fold},
                            {"train_size", f.train_size},
                            {"test_size", f.test_size},
                            {"n_trees", f.n_trees},
                            {"subspace", f.subspace.to_string()},
                            {"min_samples_split", f.min_samples_split},
                            {"inner_accuracy", f.inner_accuracy},
                            {"test_accuracy", f.test_accuracy}});
  }
  doc["mean_accuracy"] = report.mean_accuracy;
  doc["warnings"] = report.warnings;
  write_text_file(a.c.out, doc.dump(2) + "\n");
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << "mean_accuracy=" << fixed6(report.mean_accuracy) << "\n";
  return kSuccess;
}

struct BvArgs {
  Common c;
  std::string train_sizes = "200..2500";
  std::string trees = "100";
  std::string subspace = "half";
  std::size_t models = 10;
  std::size_t min_split = 2;
  std::size_t test_size = 0;
};

int cmd_eval_bv(const BvArgs& a, std::ostream& out) {
  BvConfig cfg;
  cfg.train_sizes = parse_size_list(a.train_sizes, 5);
  cfg.tree_counts = parse_size_list(a.trees);
  cfg.subspaces.clear();
  for (const auto& s : split(a.subspace, ',')) {
    cfg.subspaces.push_back(SubspaceSpec::parse(s));
  }
  cfg.models = a.models;
  cfg.min_samples_split = a.min_split;
  cfg.test_size = a.test_size;
  cfg.seed = a.c.seed;
  const Dataset data = load_csv(a.c.data, a.c.label);
  cfg.threads = resolve_threads(a.c.threads);
  const auto rows = bias_variance_experiment(data, cfg);

  std::ostringstream table;
  write_csv_row(table, {"train_size", "n_trees", "subspace", "subspace_size",
                        "models", "test_size", "bias2", "variance", "err"});
  for (const auto& r : rows) {
    write_csv_row(table, {std::to_string(r.train_size), std::to_string(r.n_trees),
                          r.subspace, std::to_string(r.subspace_size),
                          std::to_string(r.result.models),
                          std::to_string(r.result.test_size),
                          format_double(r.result.bias2),
                          format_double(r.result.variance),
                          format_double(r.result.err)});
  }
  write_text_file(a.c.out, table.str());
  out << "wrote " << rows.size() << " bias-variance rows\n";
  return kSuccess;
}

struct ScArgs {
  Common c;
  std::string subspace_range = "3..10";
  std::size_t trees = 100;
  std::size_t models = 1;
  std::size_t min_split = 2;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

int cmd_eval_sc(const ScArgs& a, std::ostream& out) {
  ScConfig cfg;
  cfg.subspace_sizes = parse_size_list(a.subspace_range);
  cfg.n_trees = a.trees;
  cfg.models = a.models;
  cfg.min_samples_split = a.min_split;
  cfg.train_size = a.train_size;
  cfg.test_size = a.test_size;
  cfg.seed = a.c.seed;
  const Dataset data = load_csv(a.c.data, a.c.label);
  cfg.threads = resolve_threads(a.c.threads);
  const auto rows = strength_correlation_experiment(data, cfg);

  std::ostringstream table;
  write_csv_row(table, {"subspace_size", "n_trees", "models", "strength",
                        "correlation", "sd", "pe_bound", "pe_bound_defined",
                        "test_accuracy"});
  for (const auto& r : rows) {
    write_csv_row(table, {std::to_string(r.subspace_size), std::to_string(a.trees),
                          std::to_string(r.models), format_double(r.result.strength),
                          number_or_nan(r.result.correlation,
                                        r.result.correlation_defined),
                          format_double(r.result.sd),
                          number_or_nan(r.result.pe_bound, r.result.pe_bound_defined),
                          r.result.pe_bound_defined ? "1" : "0",
                          format_double(r.test_accuracy)});
  }
  write_text_file(a.c.out, table.str());
  out << "wrote " << rows.size() << " strength/correlation rows\n";
  return kSuccess;
}

struct SensArgs {
  Common c;
  std::string model;
  std::string rank = "index";
};

int cmd_sensitivity(const SensArgs& a, std::ostream& out) {
  const Forest forest = load_model(a.model);
  const Dataset data = load_csv(a.c.data, a.c.label, forest.class_labels);
  if (data.n_features() != forest.n_features) {
    throw DataError("dimension mismatch: '" + a.c.data + "' has " +
                    std::to_string(data.n_features()) +
                    " feature columns, model expects " +
                    std::to_string(forest.n_features));
  }
  SensitivityOptions opt;
  if (a.rank == "index") {
    opt.order = RankOrder::kAscendingIndex;
  } else if (a.rank == "shuffle") {
    opt.order = RankOrder::kShuffled;
  } else {
    throw UsageError("--rank must be index or shuffle");
  }
  opt.shuffle_seed = a.c.seed;
  const auto report =
      compute_sensitivity(forest, data, opt, resolve_threads(a.c.threads));
  save_sensitivity_csv(report, data, a.c.out);
  out << "wrote sensitivity for " << data.size() << " rows\n";
  return kSuccess;
}

struct SubsampleArgs {
  Common c;
  std::string sens;
  double fraction = 0.25;
  std::string mode = "top";
};

int cmd_subsample(const SubsampleArgs& a, std::ostream& out) {
  const SampleMode mode = parse_sample_mode(a.mode);
  subsample_size(1, a.fraction);  // validates the fraction before any I/O
  const SensitivityTable table = load_sensitivity_csv(a.sens);
  if (table.index.empty()) throw DataError(a.sens + ": no rows");
  Rng rng(a.c.seed);
  const auto picks = subsample(table.mean, table.probability, a.fraction, mode, rng);
  std::vector<std::size_t> rows;
  rows.reserve(picks.size());
  for (const auto k : picks) rows.push_back(table.index[k]);
  save_indices_csv(rows, a.c.out);
  out << "selected " << rows.size() << " of " << table.index.size() << " rows ("
      << to_string(mode) << ")\n";
  return kSuccess;
}

struct DatagenArgs {
  Common c;
  std::string kind;
  std::size_t n = 1000;
  std::size_t features = 10;
  std::size_t centroids = 10;
  std::size_t classes = 2;
  std::size_t sectors = 0;
};

int cmd_datagen(const DatagenArgs& a, std::ostream& out) {
  GenSpec spec;
  spec.kind = parse_pattern_kind(a.kind);
  spec.n_samples = a.n;
  spec.n_features = a.features;
  spec.n_centroids = a.centroids;
  spec.n_classes = a.classes;
  spec.n_sectors = a.sectors;
  spec.seed = a.c.seed;
  const Dataset data = generate(spec);
  save_dataset_csv(data, a.c.out, a.c.label);
  out << "wrote " << data.size() << " " << to_string(spec.kind) << " rows\n";
  return kSuccess;
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         std::size_t range_points) {
  const auto dots = text.find("..");
  std::vector<std::size_t> out;
  if (dots == std::string::npos) {
    for (const auto& part : split(text, ',')) out.push_back(parse_size(part));
    return out;
  }
  const std::string lo_text = text.substr(0, dots);
  std::string hi_text = text.substr(dots + 2);
  std::size_t step = 0;
  if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
    step = parse_size(hi_text.substr(colon + 1));
    if (step == 0) throw UsageError("range step must be positive");
    hi_text = hi_text.substr(0, colon);
  }
  const std::size_t lo = parse_size(lo_text);
  const std::size_t hi = parse_size(hi_text);
  if (hi < lo) throw UsageError("range '" + text + "' is empty");
  if (step == 0 && range_points >= 2 && hi > lo) {
    for (std::size_t k = 0; k < range_points; ++k) {
      const double v = static_cast<double>(lo) +
                       static_cast<double>(hi - lo) * static_cast<double>(k) /
                           static_cast<double>(range_points - 1);
      const auto rounded = static_cast<std::size_t>(std::llround(v));
      if (out.empty() || out.back() != rounded) out.push_back(rounded);
    }
    return out;
  }
  if (step == 0) step = 1;
  for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Guided random forest: train, predict, evaluate, approximate"};
  app.name("graf");
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a forest and save it as JSON");
  t->add_option("--data", train.c.data, "Training CSV")->required();
  t->add_option("--label", train.c.label, "Label column name");
  t->add_option("--trees", train.trees, "Number of trees");
  t->add_option("--subspace", train.subspace, "log2 | sqrt | half | all | K");
  t->add_option("--min-split", train.min_split, "Minimum rows to split");
  t->add_option("--seed", train.c.seed, "Master seed");
  t->add_option("--out", train.c.out, "Model path (.graf.json)")->required();
  add_threads(t, train.c);

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "Score a CSV with a saved model");
  p->add_option("--model", pred.model, "Model path")->required();
  p->add_option("--data", pred.c.data, "CSV to score")->required();
  p->add_option("--label", pred.c.label,
                "Label column; excluded from features and used for accuracy");
  p->add_option("--out", pred.c.out, "Predictions CSV")->required();
  add_threads(p, pred.c);

  CvArgs cv;
  auto* e = app.add_subcommand("eval-cv", "Nested stratified cross-validation");
  e->add_option("--data", cv.c.data, "Dataset CSV")->required();
  e->add_option("--label", cv.c.label, "Label column name");
  e->add_flag("--grid-default", cv.grid_default, "Use the default tuning grid");
  e->add_option("--trees-grid", cv.trees_grid, "Tree counts, e.g. 100,200");
  e->add_option("--subspace-grid", cv.subspace_grid, "Subspace rules, e.g. sqrt,half");
  e->add_option("--min-split-grid", cv.min_split_grid, "Min split values, e.g. 2..5");
  e->add_option("--outer-folds", cv.outer, "Outer folds");
  e->add_option("--inner-folds", cv.inner, "Inner folds");
  e->add_option("--seed", cv.c.seed, "Seed");
  e->add_option("--out", cv.c.out, "Result table (.json)")->required();
  add_threads(e, cv.c);

  BvArgs bv;
  auto* b = app.add_subcommand("eval-bv", "Bias-variance decomposition curves");
  b->add_option("--data", bv.c.data, "Dataset CSV")->required();
  b->add_option("--label", bv.c.label, "Label column name");
  b->add_option("--train-sizes", bv.train_sizes,
                "Training sizes: list, a..b (5 points) or a..b:step");
  b->add_option("--trees", bv.trees, "Tree counts (list or range)");
  b->add_option("--subspace", bv.subspace, "Subspace rules (comma list)");
  b->add_option("--models", bv.models, "Models per configuration (R >= 2)");
  b->add_option("--min-split", bv.min_split, "Minimum rows to split");
  b->add_option("--test-size", bv.test_size, "Held-out rows (0 = half)");
  b->add_option("--seed", bv.c.seed, "Seed");
  b->add_option("--out", bv.c.out, "Output CSV")->required();
  add_threads(b, bv.c);

  ScArgs sc;
  auto* s = app.add_subcommand("eval-sc", "Strength and correlation versus subspace size");
  s->add_option("--data", sc.c.data, "Dataset CSV")->required();
  s->add_option("--label", sc.c.label, "Label column name");
  s->add_option("--subspace-range", sc.subspace_range, "Subspace sizes, e.g. 3..10");
  s->add_option("--trees", sc.trees, "Trees per forest");
  s->add_option("--models", sc.models, "Forests averaged per size");
  s->add_option("--min-split", sc.min_split, "Minimum rows to split");
  s->add_option("--train-size", sc.train_size, "Rows per model (0 = whole pool)");
  s->add_option("--test-size", sc.test_size, "Held-out rows (0 = half)");
  s->add_option("--seed", sc.c.seed, "Seed");
  s->add_option("--out", sc.c.out, "Output CSV")->required();
  add_threads(s, sc.c);

  SensArgs sens;
  auto* n = app.add_subcommand("sensitivity", "Per-sample sensitivity of training rows");
  n->add_option("--model", sens.model, "Model path")->required();
  n->add_option("--data", sens.c.data, "Training CSV")->required();
  n->add_option("--label", sens.c.label, "Label column name");
  n->add_option("--rank", sens.rank, "Within-leaf ranking: index | shuffle");
  n->add_option("--seed", sens.c.seed, "Seed for --rank shuffle");
  n->add_option("--out", sens.c.out, "Output CSV")->required();
  add_threads(n, sens.c);

  SubsampleArgs sub;
  auto* u = app.add_subcommand("subsample", "Pick rows from a sensitivity table");
  u->add_option("--sens", sub.sens, "Sensitivity CSV")->required();
  u->add_option("--fraction", sub.fraction, "Fraction in (0, 1]");
  u->add_option("--mode", sub.mode, "uniform | weighted | top");
  u->add_option("--seed", sub.c.seed, "Seed");
  u->add_option("--out", sub.c.out, "Output CSV of row indices")->required();

  DatagenArgs gen;
  auto* g = app.add_subcommand("datagen", "Generate a synthetic dataset");
  g->add_option("--kind", gen.kind, "rbf | circles | pie | xor")->required();
  g->add_option("--n", gen.n, "Samples");
  g->add_option("--features", gen.features, "Features (rbf)");
  g->add_option("--centroids", gen.centroids, "Centroids (rbf)");
  g->add_option("--classes", gen.classes, "Classes");
  g->add_option("--sectors", gen.sectors, "Pie sectors (0 = default)");
  g->add_option("--seed", gen.c.seed, "Seed");
  g->add_option("--label", gen.c.label, "Label column name");
  g->add_option("--out", gen.c.out, "Output CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "graf: " << e.what() << "\n";
    err << "run 'graf --help' for usage\n";
    return kUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train, out);
    if (p->parsed()) return run_predict(pred, out);
    if (e->parsed()) return cmd_eval_cv(cv, out);
    if (b->parsed()) return cmd_eval_bv(bv, out);
    if (s->parsed()) return cmd_eval_sc(sc, out);
    if (n->parsed()) return cmd_sensitivity(sens, out);
    if (u->parsed()) return cmd_subsample(sub, out);
    if (g->parsed()) return cmd_datagen(gen, out);
  } catch (const UsageError& ex) {
    err << "graf: " << ex.what() << "\n";
    return kUsage;
  } catch (const DataError& ex) {
    err << "graf: " << ex.what() << "\n";
    return kDataError;
  } catch (const InvariantError& ex) {
    err << "graf: internal error: " << ex.what() << "\n";
    return kInternal;
  } catch (const std::exception& ex) {
    err << "graf: internal error: " << ex.what() << "\n";
    return kInternal;
  }
  err << "graf: no command given\n";
  return kUsage;
}

}  // namespace graf::cli
