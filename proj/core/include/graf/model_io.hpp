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
#include <string>
#include <vector>

#include "graf/dataset.hpp"
#include "graf/forest.hpp"
#include "graf/sensitivity.hpp"

namespace graf {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "graf-model";

// Canonical JSON: sorted keys, two-space indent, shortest round-trip
// doubles, trailing newline. Equal forests give equal bytes.
std::string model_to_json(const Forest& forest);

// Throws FormatError (with a JSON-path style location) on malformed input,
// non-finite numbers or an unsupported format_version.
Forest model_from_json(const std::string& text);

void save_model(const Forest& forest, const std::string& path);
Forest load_model(const std::string& path);

// Columns of a CSV file split into features and an optional label column.
struct CsvData {
  std::vector<double> features;  // row-major
  std::size_t n_rows = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;  // raw label cells; empty if no column
  bool has_labels = false;
};

// Every column except `label_column` must be numeric. When
// `require_label` is false a missing label column is allowed. Errors
// name the offending row (1-based data row) and column.
CsvData read_csv_data(const std::string& path, const std::string& label_column,
                      bool require_label = true);

// Maps raw labels to class ids by first appearance. The mapping is stored
// as the dataset's class_labels.
Dataset load_csv(const std::string& path,
                 const std::string& label_column = "label");

// Same, but with a fixed label vocabulary (e.g. the one stored in a model).
// A label outside the vocabulary is a DataError.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& class_labels);

Dataset to_dataset(const CsvData& csv);
Dataset to_dataset(const CsvData& csv,
                   const std::vector<std::string>& class_labels);

// Writes the feature columns followed by a `label_column` column.
void save_dataset_csv(const Dataset& data, const std::string& path,
                      const std::string& label_column = "label");

// index,label,mean_sensitivity,probability
void save_sensitivity_csv(const SensitivityReport& report, const Dataset& data,
                          const std::string& path);

struct SensitivityTable {
  std::vector<std::size_t> index;
  std::vector<std::string> label;
  std::vector<double> mean;
  std::vector<double> probability;
};

SensitivityTable load_sensitivity_csv(const std::string& path);

// Single `index` column.
void save_indices_csv(const std::vector<std::size_t>& indices,
                      const std::string& path);

}  // namespace graf
