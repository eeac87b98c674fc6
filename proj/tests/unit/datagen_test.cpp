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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "graf/error.hpp"

namespace graf {
namespace {

GenSpec pattern(PatternKind kind, std::size_t classes, std::uint64_t seed = 0) {
  GenSpec s;
  s.kind = kind;
  s.n_classes = classes;
  s.n_samples = 500;
  s.seed = seed;
  return s;
}

std::pair<double, double> polar(double r, double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  return {r * std::cos(a), r * std::sin(a)};
}

TEST(PatternClass, XorParity) {
  const auto s = pattern(PatternKind::kXor, 2);
  EXPECT_EQ(pattern_class(s, 0.5, 0.5), pattern_class(s, -0.5, -0.5));
  EXPECT_NE(pattern_class(s, 0.5, 0.5), pattern_class(s, 0.5, -0.5));
  EXPECT_EQ(pattern_class(s, 0.5, -0.5), pattern_class(s, -0.5, 0.5));
  const auto s4 = pattern(PatternKind::kXor, 4);
  std::set<ClassId> seen{pattern_class(s4, 0.5, 0.5), pattern_class(s4, -0.5, 0.5),
                         pattern_class(s4, -0.5, -0.5), pattern_class(s4, 0.5, -0.5)};
  EXPECT_EQ(seen.size(), 4u);
}

TEST(PatternClass, CirclesRings) {
  const auto s = pattern(PatternKind::kCircles, 2);
  const auto [x1, y1] = polar(0.2, 33);
  const auto [x2, y2] = polar(0.8, 250);
  EXPECT_EQ(pattern_class(s, x1, y1), 0);  // label "1"
  EXPECT_EQ(pattern_class(s, x2, y2), 1);  // label "2"
  const auto s3 = pattern(PatternKind::kCircles, 3);
  EXPECT_EQ(pattern_class(s3, 0.5, 0.0), 1);
}

TEST(PatternClass, PieSectors) {
  const auto s = pattern(PatternKind::kPie, 4);
  const auto [x1, y1] = polar(0.5, 10);
  const auto [x2, y2] = polar(0.5, 100);
  const auto [x3, y3] = polar(0.5, 200);
  const auto [x4, y4] = polar(0.5, 300);
  EXPECT_EQ(pattern_class(s, x1, y1), 0);
  EXPECT_EQ(pattern_class(s, x2, y2), 1);
  EXPECT_EQ(pattern_class(s, x3, y3), 2);
  EXPECT_EQ(pattern_class(s, x4, y4), 3);
  // Two classes over six default sectors alternate every 60 degrees.
  const auto s2 = pattern(PatternKind::kPie, 2);
  EXPECT_EQ(default_pie_sectors(2), 6u);
  EXPECT_EQ(default_pie_sectors(5), 5u);
  const auto [a, b] = polar(0.5, 30);
  const auto [c, d] = polar(0.5, 90);
  const auto [e, f] = polar(0.5, 150);
  EXPECT_EQ(pattern_class(s2, a, b), 0);
  EXPECT_EQ(pattern_class(s2, c, d), 1);
  EXPECT_EQ(pattern_class(s2, e, f), 0);
}

TEST(BoundaryDistance, Geometry) {
  const auto xo = pattern(PatternKind::kXor, 2);
  EXPECT_DOUBLE_EQ(boundary_distance(xo, 0.3, -0.7), 0.3);
  const auto ci = pattern(PatternKind::kCircles, 2);
  EXPECT_NEAR(boundary_distance(ci, 0.6, 0.0), 0.1, 1e-12);
  const auto pie = pattern(PatternKind::kPie, 4);
  const auto [x, y] = polar(1.0, 45);
  EXPECT_NEAR(boundary_distance(pie, x, y), std::sin(std::numbers::pi / 4), 1e-12);
}

TEST(GenPattern, LabelsFollowGeometry) {
  for (const auto kind : {PatternKind::kCircles, PatternKind::kPie, PatternKind::kXor}) {
    for (const std::size_t c : {2u, 4u}) {
      const auto s = pattern(kind, c, 17);
      const auto d = generate(s);
      ASSERT_EQ(d.size(), 500u);
      ASSERT_EQ(d.n_features(), 2u);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = d.at(i, 0), y = d.at(i, 1);
        EXPECT_EQ(d.label(i), pattern_class(s, x, y));
        if (kind == PatternKind::kXor) {
          EXPECT_LE(std::abs(x), 1.0);
          EXPECT_LE(std::abs(y), 1.0);
        } else {
          EXPECT_LE(std::hypot(x, y), 1.0);
        }
      }
      for (std::size_t k = 0; k < c; ++k) EXPECT_GT(d.class_totals()[k], 0u);
    }
  }
}

TEST(Generate, DeterministicUnderSeed) {
  GenSpec s;
  s.n_samples = 100;
  s.n_features = 10;
  s.n_centroids = 10;
  s.seed = 7;
  const auto a = generate(s);
  const auto b = generate(s);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.label(i), b.label(i));
    for (std::size_t j = 0; j < a.n_features(); ++j) EXPECT_EQ(a.at(i, j), b.at(i, j));
  }
  s.seed = 8;
  const auto c = generate(s);
  EXPECT_NE(a.at(0, 0), c.at(0, 0));
}

TEST(GenRbf, OneCentroidPerClassIsUnimodal) {
  GenSpec s;
  s.n_samples = 3000;
  s.n_features = 6;
  s.n_centroids = 3;
  s.n_classes = 3;
  s.seed = 4;
  const auto d = gen_rbf(s);
  // Each class is one isotropic Gaussian with radius <= 0.4.
  for (ClassId c = 0; c < 3; ++c) {
    std::vector<double> sum(6, 0.0), sq(6, 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.label(i) != c) continue;
      ++n;
      for (std::size_t j = 0; j < 6; ++j) {
        sum[j] += d.at(i, j);
        sq[j] += d.at(i, j) * d.at(i, j);
      }
    }
    ASSERT_GT(n, 30u);
    for (std::size_t j = 0; j < 6; ++j) {
      const double m = sum[j] / static_cast<double>(n);
      const double var = sq[j] / static_cast<double>(n) - m * m;
      EXPECT_LT(var, 0.4 * 0.4 * 1.3) << "class " << c << " feature " << j;
    }
  }
}

TEST(GenRbf, LabelHistogramMatchesMixture) {
  // Centroids are drawn before samples, so rows past the first 2000 come
  // from the same mixture and estimate its class weights independently.
  constexpr std::size_t kHead = 2000;
  constexpr std::size_t kTail = 200000;
  double chi2 = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec s;
    s.n_samples = kHead + kTail;
    s.n_features = 3;
    s.n_centroids = 10;
    s.n_classes = 3;
    s.seed = seed;
    const auto d = gen_rbf(s);
    std::vector<double> head(3, 0.0), tail(3, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      (i < kHead ? head : tail)[static_cast<std::size_t>(d.label(i))] += 1.0;
    }
    for (std::size_t c = 0; c < 3; ++c) {
      const double expect = tail[c] / kTail * kHead;
      ASSERT_GT(expect, 5.0);
      chi2 += (head[c] - expect) * (head[c] - expect) / expect;
    }
  }
  // 20 degrees of freedom; 45.3 is the 0.999 quantile.
  EXPECT_LT(chi2, 45.3);
}

TEST(GenSpec, Validation) {
  auto s = pattern(PatternKind::kXor, 3);
  EXPECT_THROW(generate(s), UsageError);
  s = pattern(PatternKind::kCircles, 1);
  EXPECT_THROW(generate(s), UsageError);
  GenSpec r;
  r.n_centroids = 1;
  EXPECT_THROW(generate(r), UsageError);
  r = GenSpec{};
  r.n_samples = 0;
  EXPECT_THROW(generate(r), UsageError);
  s = pattern(PatternKind::kPie, 4);
  s.n_sectors = 3;
  EXPECT_THROW(generate(s), UsageError);
  EXPECT_EQ(parse_pattern_kind("pie"), PatternKind::kPie);
  EXPECT_STREQ(to_string(PatternKind::kCircles), "circles");
  EXPECT_THROW(parse_pattern_kind("moons"), UsageError);
}

}  // namespace
}  // namespace graf
