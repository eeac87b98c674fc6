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
#include <string>

#include "graf/dataset.hpp"

namespace graf {

enum class PatternKind : std::uint8_t { kRbf, kCircles, kPie, kXor };

PatternKind parse_pattern_kind(const std::string& text);
const char* to_string(PatternKind kind) noexcept;

struct GenSpec {
  PatternKind kind = PatternKind::kRbf;
  std::size_t n_samples = 1000;
  std::size_t n_features = 10;   // rbf only; patterns are 2-D
  std::size_t n_centroids = 10;  // rbf only
  std::size_t n_classes = 2;
  std::size_t n_sectors = 0;     // pie only; 0 picks the default
  std::uint64_t seed = 0;

  // Throws UsageError on an inconsistent spec.
  void validate() const;
};

// Random radial-basis mixture: centroids uniform in [-1, 1]^d with classes
// assigned round-robin, radius ~ U(0.05, 0.4), mixture weight ~ U(0, 1);
// each sample is its centroid plus N(0, radius^2) noise per coordinate.
Dataset gen_rbf(const GenSpec& spec);

// 2-D geometric patterns with noise-free labels:
//  circles: radius ~ U(0, 1), angle ~ U(0, 2π); class = annulus index of C
//           equal-width rings;
//  pie:     uniform in the unit disc; class = angular sector mod C, sectors
//           counted counter-clockwise from the +x axis;
//  xor:     uniform in [-1, 1]^2; C = 2 uses quadrant sign parity, C = 4
//           gives each quadrant its own class.
Dataset gen_pattern(const GenSpec& spec);

// Dispatches on spec.kind.
Dataset generate(const GenSpec& spec);

// Sector count used for pie when spec.n_sectors == 0: C if C >= 4, else 6.
std::size_t default_pie_sectors(std::size_t n_classes);

// Zero-based class of point (x, y) under a pattern.
ClassId pattern_class(const GenSpec& spec, double x, double y);

// Euclidean distance from (x, y) to the nearest class boundary of a pattern.
double boundary_distance(const GenSpec& spec, double x, double y);

}  // namespace graf
