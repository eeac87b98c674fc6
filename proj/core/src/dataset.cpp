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

#include "graf/dataset.hpp"

#include <cmath>
#include <string>

#include "graf/error.hpp"

namespace graf {

Dataset::Dataset(std::vector<double> features, std::size_t n_features,
                 std::vector<ClassId> labels, std::size_t n_classes,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> class_labels)
    : features_(std::move(features)),
      n_features_(n_features),
      labels_(std::move(labels)),
      class_totals_(n_classes, 0),
      feature_names_(std::move(feature_names)),
      class_labels_(std::move(class_labels)) {
  if (n_features_ == 0) throw DataError("dataset needs at least one feature");
  if (n_classes == 0) throw DataError("dataset needs at least one class");
  if (features_.size() != labels_.size() * n_features_) {
    throw DataError("feature matrix has " + std::to_string(features_.size()) +
                    " values, expected " +
                    std::to_string(labels_.size() * n_features_));
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k])) {
      throw DataError("non-finite feature at row " +
                      std::to_string(k / n_features_) + ", column " +
                      std::to_string(k % n_features_));
    }
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const ClassId y = labels_[i];
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      throw DataError("label " + std::to_string(y) + " at row " +
                      std::to_string(i) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
    ++class_totals_[static_cast<std::size_t>(y)];
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < n_features_; ++j) {
      feature_names_.push_back("x" + std::to_string(j + 1));
    }
  } else if (feature_names_.size() != n_features_) {
    throw DataError("feature name count does not match feature count");
  }
  if (class_labels_.empty()) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      class_labels_.push_back(std::to_string(c + 1));
    }
  } else if (class_labels_.size() != n_classes) {
    throw DataError("class label count does not match class count");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> x;
  x.reserve(indices.size() * n_features_);
  std::vector<ClassId> y;
  y.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= size()) throw UsageError("subset index out of range");
    const auto r = row(i);
    x.insert(x.end(), r.begin(), r.end());
    y.push_back(labels_[i]);
  }
  return Dataset(std::move(x), n_features_, std::move(y), n_classes(),
                 feature_names_, class_labels_);
}

}  // namespace graf
