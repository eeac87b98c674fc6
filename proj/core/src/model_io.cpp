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

#include "graf/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "graf/csv.hpp"
#include "graf/error.hpp"
#include "json.hpp"

namespace graf {

using nlohmann::json;

namespace {

// ---- encoding --------------------------------------------------------------

json encode_tree(const TreeInstance& tree) {
  json t;
  t["subspace"] = std::vector<std::size_t>(tree.subspace.indices().begin(),
                                           tree.subspace.indices().end());
  json planes = json::array();
  for (std::size_t k = 0; k < tree.hyperplanes.size(); ++k) {
    planes.push_back({{"step", k},
                      {"weights", tree.hyperplanes[k].weights},
                      {"bias", tree.hyperplanes[k].bias}});
  }
  t["hyperplanes"] = std::move(planes);
  json nodes = json::array();
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& n = tree.nodes[k];
    nodes.push_back({{"id", k},
                     {"parent", n.parent},
                     {"bit", n.bit},
                     {"step", n.step},
                     {"leaf", n.leaf}});
  }
  t["nodes"] = std::move(nodes);
  json leaves = json::array();
  for (const LeafRecord& leaf : tree.leaves) {
    leaves.push_back({{"code", leaf.code},
                      {"node", leaf.node},
                      {"state", to_string(leaf.state)},
                      {"created_step", leaf.created_step},
                      {"weight_count", leaf.weight_count},
                      {"size", leaf.size},
                      {"class_counts", leaf.class_counts},
                      {"posterior", leaf.posterior}});
  }
  t["leaves"] = std::move(leaves);
  return t;
}

// ---- decoding --------------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::string where) : where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(where_, what);
  }

  Reader at(const std::string& key) const { return Reader(where_ + "." + key); }
  Reader at(std::size_t index) const {
    return Reader(where_ + "[" + std::to_string(index) + "]");
  }

  const json& field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail("expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const json& v) const {
    if (!v.is_number()) fail("expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("non-finite number");
    return d;
  }

  std::size_t count(const json& v) const {
    if (!v.is_number_unsigned()) {
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::size_t>(v.get<std::int64_t>());
      }
      fail("expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  int integer(const json& v) const {
    if (!v.is_number_integer()) fail("expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -1 || x > std::numeric_limits<int>::max()) fail("integer out of range");
    return static_cast<int>(x);
  }

  std::uint64_t u64(const json& v) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail("expected an unsigned 64-bit integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const json& v) const {
    if (!v.is_string()) fail("expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& v) const {
    if (!v.is_array()) fail("expected an array");
    return v;
  }

  std::vector<double> numbers(const json& v) const {
    array(v);
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(at(k).number(v[k]));
    return out;
  }

  std::vector<std::size_t> counts(const json& v) const {
    array(v);
    std::vector<std::size_t> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(at(k).count(v[k]));
    return out;
  }

  std::vector<std::string> texts(const json& v) const {
    array(v);
    std::vector<std::string> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(at(k).text(v[k]));
    return out;
  }

 private:
  std::string where_;
};

PartitionState parse_state(const Reader& r, const std::string& s) {
  if (s == "pure") return PartitionState::kPure;
  if (s == "unsplittable") return PartitionState::kUnsplittable;
  if (s == "impure") return PartitionState::kImpure;
  r.fail("unknown leaf state '" + s + "'");
}

TreeInstance decode_tree(const Reader& r, const json& t, std::size_t n_features,
                         std::size_t n_classes) {
  TreeInstance tree;
  {
    const Reader rs = r.at("subspace");
    auto idx = rs.counts(r.field(t, "subspace"));
    try {
      tree.subspace = SubspaceView(std::move(idx), n_features);
    } catch (const UsageError& e) {
      rs.fail(e.what());
    }
  }
  const std::size_t m = tree.subspace.size();

  const Reader rh = r.at("hyperplanes");
  const json& planes = rh.array(r.field(t, "hyperplanes"));
  for (std::size_t k = 0; k < planes.size(); ++k) {
    const Reader rk = rh.at(k);
    if (rk.count(rk.field(planes[k], "step")) != k) rk.fail("step out of order");
    Hyperplane h;
    h.weights = rk.at("weights").numbers(rk.field(planes[k], "weights"));
    h.bias = rk.at("bias").number(rk.field(planes[k], "bias"));
    if (h.weights.size() != m) rk.fail("weight count differs from subspace size");
    tree.hyperplanes.push_back(std::move(h));
  }

  const Reader rn = r.at("nodes");
  const json& nodes = rn.array(r.field(t, "nodes"));
  if (nodes.empty()) rn.fail("tree has no nodes");
  tree.nodes.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Reader rk = rn.at(k);
    if (rk.count(rk.field(nodes[k], "id")) != k) rk.fail("id out of order");
    TreeNode& n = tree.nodes[k];
    n.parent = rk.at("parent").integer(rk.field(nodes[k], "parent"));
    n.bit = rk.at("bit").integer(rk.field(nodes[k], "bit"));
    n.step = rk.at("step").integer(rk.field(nodes[k], "step"));
    n.leaf = rk.at("leaf").integer(rk.field(nodes[k], "leaf"));
    if ((k == 0) != (n.parent < 0)) rk.fail("only the root may lack a parent");
    if (k > 0) {
      if (static_cast<std::size_t>(n.parent) >= k) rk.fail("parent must precede child");
      if (n.bit != 0 && n.bit != 1) rk.fail("bit must be 0 or 1");
      auto& slot = tree.nodes[static_cast<std::size_t>(n.parent)].children[n.bit];
      if (slot >= 0) rk.fail("duplicate child edge");
      slot = static_cast<int>(k);
    }
    if (n.step >= static_cast<int>(tree.hyperplanes.size())) {
      rk.fail("step references a missing hyperplane");
    }
    if ((n.step < 0) == (n.leaf < 0)) rk.fail("node must be exactly one of leaf or split");
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& n = tree.nodes[k];
    if (n.step >= 0 && (n.children[0] < 0 || n.children[1] < 0)) {
      rn.at(k).fail("split node is missing a child");
    }
    if (n.step < 0 && (n.children[0] >= 0 || n.children[1] >= 0)) {
      rn.at(k).fail("leaf node has children");
    }
    if (n.parent >= 0 &&
        tree.nodes[static_cast<std::size_t>(n.parent)].step >= n.step && n.step >= 0) {
      rn.at(k).fail("steps must increase along a path");
    }
  }

  const Reader rl = r.at("leaves");
  const json& leaves = rl.array(r.field(t, "leaves"));
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Reader rk = rl.at(k);
    const json& v = leaves[k];
    LeafRecord leaf;
    leaf.code = rk.at("code").text(rk.field(v, "code"));
    leaf.node = rk.at("node").integer(rk.field(v, "node"));
    leaf.state = parse_state(rk.at("state"), rk.at("state").text(rk.field(v, "state")));
    leaf.created_step = rk.at("created_step").count(rk.field(v, "created_step"));
    leaf.weight_count = rk.at("weight_count").count(rk.field(v, "weight_count"));
    leaf.size = rk.at("size").count(rk.field(v, "size"));
    leaf.class_counts = rk.at("class_counts").counts(rk.field(v, "class_counts"));
    leaf.posterior = rk.at("posterior").numbers(rk.field(v, "posterior"));
    if (leaf.node < 0 || static_cast<std::size_t>(leaf.node) >= tree.nodes.size() ||
        tree.nodes[static_cast<std::size_t>(leaf.node)].leaf != static_cast<int>(k)) {
      rk.fail("leaf and node records disagree");
    }
    if (leaf.posterior.size() != n_classes || leaf.class_counts.size() != n_classes) {
      rk.fail("class vector length differs from class count");
    }
    tree.leaves.push_back(std::move(leaf));
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const int leaf = tree.nodes[k].leaf;
    if (leaf >= static_cast<int>(tree.leaves.size())) {
      rn.at(k).fail("leaf index out of range");
    }
  }
  return tree;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace

std::string model_to_json(const Forest& forest) {
  json doc;
  doc["format"] = kModelFormatName;
  doc["format_version"] = kModelFormatVersion;
  doc["config"] = {{"n_trees", forest.config.n_trees},
                   {"subspace", forest.config.subspace.to_string()},
                   {"min_samples_split", forest.config.min_samples_split},
                   {"master_seed", forest.config.master_seed}};
  doc["n_features"] = forest.n_features;
  doc["subspace_size"] = forest.subspace_size;
  doc["class_totals"] = forest.class_totals;
  doc["class_labels"] = forest.class_labels;
  doc["feature_names"] = forest.feature_names;
  json trees = json::array();
  for (const auto& t : forest.trees) trees.push_back(encode_tree(t));
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

Forest model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("byte " + std::to_string(e.byte), e.what());
  } catch (const json::exception& e) {
    throw FormatError("", e.what());
  }
  const Reader r("$");
  if (r.at("format").text(r.field(doc, "format")) != kModelFormatName) {
    r.at("format").fail("not a graf model document");
  }
  const json& version = r.field(doc, "format_version");
  if (!version.is_number_integer()) r.at("format_version").fail("expected an integer");
  if (version.get<std::int64_t>() != kModelFormatVersion) {
    r.at("format_version")
        .fail("unsupported format_version " + version.dump() + " (this build reads " +
              std::to_string(kModelFormatVersion) + ")");
  }

  Forest f;
  const Reader rc = r.at("config");
  const json& cfg = r.field(doc, "config");
  f.config.n_trees = rc.at("n_trees").count(rc.field(cfg, "n_trees"));
  try {
    f.config.subspace = SubspaceSpec::parse(rc.at("subspace").text(rc.field(cfg, "subspace")));
  } catch (const UsageError& e) {
    rc.at("subspace").fail(e.what());
  }
  f.config.min_samples_split =
      rc.at("min_samples_split").count(rc.field(cfg, "min_samples_split"));
  f.config.master_seed = rc.at("master_seed").u64(rc.field(cfg, "master_seed"));

  f.n_features = r.at("n_features").count(r.field(doc, "n_features"));
  f.subspace_size = r.at("subspace_size").count(r.field(doc, "subspace_size"));
  f.class_totals = r.at("class_totals").counts(r.field(doc, "class_totals"));
  f.class_labels = r.at("class_labels").texts(r.field(doc, "class_labels"));
  f.feature_names = r.at("feature_names").texts(r.field(doc, "feature_names"));
  if (f.n_features == 0) r.at("n_features").fail("must be positive");
  if (f.class_totals.empty()) r.at("class_totals").fail("must not be empty");
  if (f.class_labels.size() != f.class_totals.size()) {
    r.at("class_labels").fail("length differs from class_totals");
  }
  if (f.feature_names.size() != f.n_features) {
    r.at("feature_names").fail("length differs from n_features");
  }

  const Reader rt = r.at("trees");
  const json& trees = rt.array(r.field(doc, "trees"));
  if (trees.size() != f.config.n_trees) rt.fail("tree count differs from config.n_trees");
  for (std::size_t k = 0; k < trees.size(); ++k) {
    f.trees.push_back(decode_tree(rt.at(k), trees[k], f.n_features, f.n_classes()));
  }
  return f;
}

void save_model(const Forest& forest, const std::string& path) {
  write_file(path, model_to_json(forest));
}

Forest load_model(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return model_from_json(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ":" + e.location(),
                      std::string(e.what()).substr(e.location().size() +
                                                   (e.location().empty() ? 0 : 2)));
  }
}

CsvData read_csv_data(const std::string& path, const std::string& label_column,
                      bool require_label) {
  const CsvTable table = read_csv_file(path);
  std::size_t label_at = table.header.size();
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == label_column) label_at = j;
  }
  CsvData out;
  out.has_labels = label_at < table.header.size();
  if (!out.has_labels && require_label) {
    throw DataError(path + ": no label column '" + label_column + "'");
  }
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != label_at) out.feature_names.push_back(table.header[j]);
  }
  if (out.feature_names.empty()) throw DataError(path + ": no feature columns");
  if (table.rows.empty()) throw DataError(path + ": no data rows");
  out.n_rows = table.rows.size();
  out.features.reserve(out.n_rows * out.feature_names.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::string where = path + ": row " + std::to_string(i + 1) +
                                ", column '" + table.header[j] + "'";
      if (j == label_at) {
        if (row[j].empty()) throw DataError(where + ": missing label");
        out.labels.push_back(row[j]);
        continue;
      }
      double v = 0.0;
      if (row[j].empty()) throw DataError(where + ": missing value");
      if (!parse_double(row[j], v)) {
        throw DataError(where + ": not a number ('" + row[j] + "')");
      }
      if (!std::isfinite(v)) throw DataError(where + ": non-finite value");
      out.features.push_back(v);
    }
  }
  return out;
}

Dataset to_dataset(const CsvData& csv) {
  if (!csv.has_labels) throw DataError("dataset has no label column");
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, ClassId> ids;
  std::vector<ClassId> y;
  y.reserve(csv.labels.size());
  for (const auto& raw : csv.labels) {
    const auto [it, inserted] =
        ids.try_emplace(raw, static_cast<ClassId>(vocabulary.size()));
    if (inserted) vocabulary.push_back(raw);
    y.push_back(it->second);
  }
  const std::size_t n_classes = vocabulary.size();
  return Dataset(csv.features, csv.feature_names.size(), std::move(y), n_classes,
                 csv.feature_names, std::move(vocabulary));
}

Dataset to_dataset(const CsvData& csv,
                   const std::vector<std::string>& class_labels) {
  if (!csv.has_labels) throw DataError("dataset has no label column");
  std::unordered_map<std::string, ClassId> ids;
  for (std::size_t c = 0; c < class_labels.size(); ++c) {
    ids.emplace(class_labels[c], static_cast<ClassId>(c));
  }
  std::vector<ClassId> y;
  y.reserve(csv.labels.size());
  for (std::size_t i = 0; i < csv.labels.size(); ++i) {
    const auto it = ids.find(csv.labels[i]);
    if (it == ids.end()) {
      throw DataError("row " + std::to_string(i + 1) + ": label '" +
                      csv.labels[i] + "' was not seen in training");
    }
    y.push_back(it->second);
  }
  return Dataset(csv.features, csv.feature_names.size(), std::move(y),
                 class_labels.size(), csv.feature_names, class_labels);
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  return to_dataset(read_csv_data(path, label_column));
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& class_labels) {
  try {
    return to_dataset(read_csv_data(path, label_column), class_labels);
  } catch (const FormatError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_dataset_csv(const Dataset& data, const std::string& path,
                      const std::string& label_column) {
  std::ostringstream out;
  auto header = data.feature_names();
  header.push_back(label_column);
  write_csv_row(out, header);
  std::vector<std::string> fields(data.n_features() + 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.n_features(); ++j) {
      fields[j] = format_double(data.at(i, j));
    }
    fields.back() = data.class_labels()[static_cast<std::size_t>(data.label(i))];
    write_csv_row(out, fields);
  }
  write_file(path, out.str());
}

void save_sensitivity_csv(const SensitivityReport& report, const Dataset& data,
                          const std::string& path) {
  if (report.mean.size() != data.size()) {
    throw UsageError("sensitivity report and dataset differ in length");
  }
  std::ostringstream out;
  write_csv_row(out, {"index", "label", "mean_sensitivity", "probability"});
  for (std::size_t i = 0; i < data.size(); ++i) {
    write_csv_row(out, {std::to_string(i),
                        data.class_labels()[static_cast<std::size_t>(data.label(i))],
                        format_double(report.mean[i]),
                        format_double(report.probability[i])});
  }
  write_file(path, out.str());
}

SensitivityTable load_sensitivity_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const std::vector<std::string> expected{"index", "label", "mean_sensitivity",
                                          "probability"};
  if (table.header != expected) {
    throw DataError(path + ": expected columns index,label,mean_sensitivity,probability");
  }
  SensitivityTable out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + ": row " + std::to_string(i + 1);
    double index = 0.0;
    double mean = 0.0;
    double prob = 0.0;
    if (!parse_double(row[0], index) || index < 0 || index != std::floor(index)) {
      throw DataError(where + ": bad index");
    }
    if (!parse_double(row[2], mean) || !std::isfinite(mean) || mean < 0.0) {
      throw DataError(where + ": bad mean_sensitivity");
    }
    if (!parse_double(row[3], prob) || !std::isfinite(prob) || prob < 0.0) {
      throw DataError(where + ": bad probability");
    }
    out.index.push_back(static_cast<std::size_t>(index));
    out.label.push_back(row[1]);
    out.mean.push_back(mean);
    out.probability.push_back(prob);
  }
  return out;
}

void save_indices_csv(const std::vector<std::size_t>& indices,
                      const std::string& path) {
  std::ostringstream out;
  out << "index\n";
  for (const auto i : indices) out << i << '\n';
  write_file(path, out.str());
}

}  // namespace graf
