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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "graf/dataset.hpp"
#include "graf/random.hpp"

namespace graf::testing {

// Features uniform on [-scale, scale], labels uniform over n_classes.
inline Dataset random_dataset(std::size_t n, std::size_t d,
                              std::size_t n_classes, std::uint64_t seed,
                              double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> x(n * d);
  for (auto& v : x) v = rng.uniform(-scale, scale);
  std::vector<ClassId> y(n);
  for (auto& v : y) v = static_cast<ClassId>(rng.uniform_index(n_classes));
  return Dataset(std::move(x), d, std::move(y), n_classes);
}

inline Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                            const std::vector<ClassId>& labels,
                            std::size_t n_classes) {
  std::vector<double> x;
  for (const auto& r : rows) x.insert(x.end(), r.begin(), r.end());
  return Dataset(std::move(x), rows.front().size(), labels, n_classes);
}

// Four points at the quadrant centres, labelled by sign parity.
inline Dataset xor4() {
  return make_dataset({{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}, {0, 0, 1, 1}, 2);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("graf_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace graf::testing
