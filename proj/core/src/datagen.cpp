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

#include "graf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "graf/error.hpp"
#include "graf/random.hpp"

namespace graf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sectors_of(const GenSpec& spec) {
  return spec.n_sectors != 0 ? spec.n_sectors
                             : default_pie_sectors(spec.n_classes);
}

double angle_of(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Distance from p to the ray starting at the origin with direction angle t.
double distance_to_ray(double x, double y, double t) {
  const double ux = std::cos(t);
  const double uy = std::sin(t);
  const double along = x * ux + y * uy;
  if (along <= 0.0) return std::hypot(x, y);
  return std::abs(x * uy - y * ux);
}

}  // namespace

PatternKind parse_pattern_kind(const std::string& text) {
  if (text == "rbf") return PatternKind::kRbf;
  if (text == "circles") return PatternKind::kCircles;
  if (text == "pie") return PatternKind::kPie;
  if (text == "xor") return PatternKind::kXor;
  throw UsageError("unknown dataset kind '" + text +
                   "' (expected rbf, circles, pie or xor)");
}

const char* to_string(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::kRbf:
      return "rbf";
    case PatternKind::kCircles:
      return "circles";
    case PatternKind::kPie:
      return "pie";
    case PatternKind::kXor:
      return "xor";
  }
  return "unknown";
}

std::size_t default_pie_sectors(std::size_t n_classes) {
  return n_classes >= 4 ? n_classes : 6;
}

void GenSpec::validate() const {
  if (n_samples == 0) throw UsageError("n_samples must be positive");
  if (n_classes < 2) throw UsageError("n_classes must be at least 2");
  switch (kind) {
    case PatternKind::kRbf:
      if (n_features == 0) throw UsageError("n_features must be positive");
      if (n_centroids < n_classes) {
        throw UsageError("rbf needs at least as many centroids as classes");
      }
      break;
    case PatternKind::kXor:
      if (n_classes != 2 && n_classes != 4) {
        throw UsageError("xor supports 2 or 4 classes");
      }
      break;
    case PatternKind::kPie:
      if (n_sectors != 0 && n_sectors < n_classes) {
        throw UsageError("pie needs at least as many sectors as classes");
      }
      break;
    case PatternKind::kCircles:
      break;
  }
}

Dataset gen_rbf(const GenSpec& spec) {
  if (spec.kind != PatternKind::kRbf) throw UsageError("gen_rbf needs kind rbf");
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t d = spec.n_features;
  const std::size_t k = spec.n_centroids;

  std::vector<double> centre(k * d);
  std::vector<double> radius(k);
  std::vector<double> cumulative(k);
  double weight_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) centre[c * d + j] = rng.uniform(-1.0, 1.0);
    radius[c] = rng.uniform(0.05, 0.4);
    weight_sum += rng.uniform01();
    cumulative[c] = weight_sum;
  }

  std::vector<double> x(spec.n_samples * d);
  std::vector<ClassId> y(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const double u = rng.uniform01() * weight_sum;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto c = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), k - 1);
    for (std::size_t j = 0; j < d; ++j) {
      x[i * d + j] = centre[c * d + j] + radius[c] * rng.normal();
    }
    y[i] = static_cast<ClassId>(c % spec.n_classes);
  }
  return Dataset(std::move(x), d, std::move(y), spec.n_classes);
}

ClassId pattern_class(const GenSpec& spec, double x, double y) {
  const auto classes = spec.n_classes;
  switch (spec.kind) {
    case PatternKind::kCircles: {
      const double r = std::hypot(x, y);
      const auto ring = static_cast<std::size_t>(r * static_cast<double>(classes));
      return static_cast<ClassId>(std::min(ring, classes - 1));
    }
    case PatternKind::kPie: {
      const std::size_t sectors = sectors_of(spec);
      const double width = kTwoPi / static_cast<double>(sectors);
      const auto s = std::min(
          static_cast<std::size_t>(angle_of(x, y) / width), sectors - 1);
      return static_cast<ClassId>(s % classes);
    }
    case PatternKind::kXor: {
      const bool right = x > 0.0;
      const bool top = y > 0.0;
      if (classes == 2) return right == top ? 0 : 1;
      return static_cast<ClassId>((top ? 0 : 2) + (right ? 0 : 1));
    }
    case PatternKind::kRbf:
      break;
  }
  throw UsageError("rbf has no closed-form class regions");
}

double boundary_distance(const GenSpec& spec, double x, double y) {
  switch (spec.kind) {
    case PatternKind::kCircles: {
      const double r = std::hypot(x, y);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < spec.n_classes; ++k) {
        best = std::min(best, std::abs(r - static_cast<double>(k) /
                                               static_cast<double>(spec.n_classes)));
      }
      return best;
    }
    case PatternKind::kPie: {
      const std::size_t sectors = sectors_of(spec);
      const double width = kTwoPi / static_cast<double>(sectors);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < sectors; ++s) {
        // Only edges between sectors of different classes are boundaries.
        const std::size_t prev = (s + sectors - 1) % sectors;
        if (s % spec.n_classes == prev % spec.n_classes) continue;
        best = std::min(best, distance_to_ray(x, y, width * static_cast<double>(s)));
      }
      return best;
    }
    case PatternKind::kXor:
      return std::min(std::abs(x), std::abs(y));
    case PatternKind::kRbf:
      break;
  }
  throw UsageError("rbf has no closed-form class boundary");
}

Dataset gen_pattern(const GenSpec& spec) {
  if (spec.kind == PatternKind::kRbf) {
    throw UsageError("gen_pattern needs kind circles, pie or xor");
  }
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> x(spec.n_samples * 2);
  std::vector<ClassId> y(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    double px = 0.0;
    double py = 0.0;
    switch (spec.kind) {
      case PatternKind::kCircles: {
        const double r = rng.uniform01();
        const double t = rng.uniform(0.0, kTwoPi);
        px = r * std::cos(t);
        py = r * std::sin(t);
        break;
      }
      case PatternKind::kPie: {
        const double r = std::sqrt(rng.uniform01());
        const double t = rng.uniform(0.0, kTwoPi);
        px = r * std::cos(t);
        py = r * std::sin(t);
        break;
      }
      default:
        px = rng.uniform(-1.0, 1.0);
        py = rng.uniform(-1.0, 1.0);
        break;
    }
    x[2 * i] = px;
    x[2 * i + 1] = py;
    y[i] = pattern_class(spec, px, py);
  }
  return Dataset(std::move(x), 2, std::move(y), spec.n_classes);
}

Dataset generate(const GenSpec& spec) {
  return spec.kind == PatternKind::kRbf ? gen_rbf(spec) : gen_pattern(spec);
}

}  // namespace graf
