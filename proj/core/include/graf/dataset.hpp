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
#include <span>
#include <string>
#include <vector>

namespace graf {

using ClassId = int;

// Dense row-major sample matrix with integer class labels.
//
// Class ids are zero-based internally (0..C-1); `class_labels` keeps the
// external name of each id so files can be written back in the caller's
// vocabulary. The class count is fixed at construction and may exceed the
// number of classes actually present (e.g. for a stratified subset).
class Dataset {
 public:
  Dataset() = default;

  // Validates shape, finiteness and label range. Throws DataError.
  Dataset(std::vector<double> features, std::size_t n_features,
          std::vector<ClassId> labels, std::size_t n_classes,
          std::vector<std::string> feature_names = {},
          std::vector<std::string> class_labels = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_classes() const noexcept { return class_totals_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * n_features_, n_features_};
  }
  double at(std::size_t i, std::size_t j) const {
    return features_[i * n_features_ + j];
  }
  ClassId label(std::size_t i) const { return labels_[i]; }

  std::span<const double> features() const noexcept { return features_; }
  std::span<const ClassId> labels() const noexcept { return labels_; }
  std::span<const std::size_t> class_totals() const noexcept {
    return class_totals_;
  }
  const std::vector<std::string>& feature_names() const noexcept {
    return feature_names_;
  }
  const std::vector<std::string>& class_labels() const noexcept {
    return class_labels_;
  }

  // Rows `indices` in the given order; keeps class count and names.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> features_;
  std::size_t n_features_ = 0;
  std::vector<ClassId> labels_;
  std::vector<std::size_t> class_totals_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_labels_;
};

}  // namespace graf
