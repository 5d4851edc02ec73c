// Copyright 2026 The SPA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "spa/metrics.hpp"
#include "spa/weighting.hpp"
#include "test_support.hpp"

namespace spa {
namespace {

using testing::error_of;

// Exact moments of P over class-count compositions, weighted by the
// multinomial probability. Independent of the library's sequence enumerator.
struct Moments {
  long double mean = 0;
  long double variance = 0;
};

Moments composition_moments(int n, const std::vector<double>& p) {
  const int classes = static_cast<int>(p.size());
  std::vector<int> counts(classes, 0);
  long double m1 = 0;
  long double m2 = 0;
  const long double pairs = static_cast<long double>(n) * (n - 1);
  std::function<void(int, int)> visit = [&](int c, int left) {
    if (c == classes - 1) {
      counts[c] = left;
      long double log_prob = std::lgammal(n + 1.0L);
      long double same = 0;
      for (int k = 0; k < classes; ++k) {
        log_prob -= std::lgammal(counts[k] + 1.0L);
        if (counts[k] > 0) {
          if (p[k] == 0.0) return;
          log_prob += counts[k] * std::log(static_cast<long double>(p[k]));
        }
        same += static_cast<long double>(counts[k]) * (counts[k] - 1);
      }
      const long double prob = std::exp(log_prob);
      const long double agreement = same / pairs;
      m1 += prob * agreement;
      m2 += prob * agreement * agreement;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      counts[c] = v;
      visit(c + 1, left - v);
    }
  };
  visit(0, n);
  return {m1, m2 - m1 * m1};
}

std::vector<double> uniform_probs(int classes) {
  return std::vector<double>(classes, 1.0 / classes);
}

TEST(SimpleWeight, Examples) {
  EXPECT_EQ(simple_weight(SchemeKind::kEdge, 11), 55.0);
  EXPECT_EQ(simple_weight(SchemeKind::kAnnotationsM1, 1), 0.0);
  EXPECT_EQ(simple_weight(SchemeKind::kAnnotations, 4), 4.0);
  EXPECT_EQ(simple_weight(SchemeKind::kFlat, 4), 1.0);
  EXPECT_EQ(simple_weight(SchemeKind::kAnnotationsM1, 4), 3.0);
  EXPECT_EQ(simple_weight(SchemeKind::kEdge, 4), 6.0);
  for (auto kind : {SchemeKind::kFlat, SchemeKind::kAnnotations,
                    SchemeKind::kAnnotationsM1, SchemeKind::kEdge}) {
    EXPECT_EQ(simple_weight(kind, 0), 0.0);
    EXPECT_EQ(simple_weight(kind, 1), 0.0);
  }
}

TEST(SchemeNames, RoundTrip) {
  for (SchemeKind kind : kAllSchemeKinds) {
    EXPECT_EQ(parse_scheme_kind(scheme_name(kind)), kind);
  }
  EXPECT_EQ(scheme_name(SchemeKind::kAnnotationsM1), "annotations_m1");
  EXPECT_EQ(error_of([] { parse_scheme_kind("edges"); }), ErrorCode::kUsage);
}

TEST(VarianceUniform, FrozenValues) {
  EXPECT_NEAR(item_variance_uniform(2, 2).variance, 0.25, 1e-15);
  EXPECT_NEAR(item_variance_uniform(2, 4).variance, 3.0 / 16.0, 1e-15);
  EXPECT_NEAR(item_variance_uniform(3, 3).variance, 2.0 / 27.0, 1e-15);
  EXPECT_NEAR(item_variance_uniform(4, 2).variance, 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(item_variance_uniform(5, 3).variance, 1.0 / 45.0, 1e-15);
  EXPECT_NEAR(item_variance_uniform(3, 4).expected_agreement, 0.25, 1e-15);
}

TEST(VarianceUniform, SingleAnnotationIsInfinite) {
  for (std::int64_t c = 2; c <= 6; ++c) {
    const auto r = item_variance_uniform(1, c);
    EXPECT_TRUE(r.infinite());
    EXPECT_TRUE(std::isinf(r.variance));
  }
}

TEST(VarianceUniform, RejectsFewClasses) {
  EXPECT_EQ(error_of([] { item_variance_uniform(3, 1); }),
            ErrorCode::kInvalidClassCount);
}

TEST(VarianceUniform, PairIsBernoulli) {
  for (std::int64_t c = 2; c <= 9; ++c) {
    const double q = 1.0 / static_cast<double>(c);
    EXPECT_NEAR(item_variance_uniform(2, c).variance, q * (1.0 - q), 1e-15);
  }
}

TEST(VarianceUniform, MatchesCompositionOracle) {
  for (int n = 2; n <= 14; ++n) {
    for (int c = 2; c <= 5; ++c) {
      const auto m = composition_moments(n, uniform_probs(c));
      const auto r = item_variance_uniform(n, c);
      EXPECT_NEAR(r.variance, static_cast<double>(m.variance), 1e-12)
          << "n=" << n << " C=" << c;
      EXPECT_NEAR(r.expected_agreement, static_cast<double>(m.mean), 1e-12);
    }
  }
}

TEST(VarianceUniform, LargeNStaysFinite) {
  for (std::int64_t n : {200, 1000, 3000}) {
    const auto r = item_variance_uniform(n, 5);
    ASSERT_TRUE(std::isfinite(r.variance));
    EXPECT_GE(r.variance, 0.0);
    EXPECT_NEAR(r.variance * static_cast<double>(possible_edges(n)),
                0.2 * 0.8, 1e-6);
  }
}

TEST(VarianceClassDist, FrozenValues) {
  EXPECT_NEAR(item_variance_classdist(2, ClassDistribution({0.5, 0.5})).variance,
              0.25, 1e-15);
  EXPECT_EQ(item_variance_classdist(2, ClassDistribution({1.0})).variance, 0.0);
  const auto skewed = item_variance_classdist(3, ClassDistribution({0.75, 0.25}));
  EXPECT_NEAR(skewed.variance, 7.0 / 64.0, 1e-15);
  EXPECT_NEAR(skewed.expected_agreement, 5.0 / 8.0, 1e-15);
  EXPECT_NEAR(
      item_variance_classdist(4, ClassDistribution({0.5, 0.25, 0.25})).variance,
      19.0 / 384.0, 1e-15);
  const auto three = item_variance_classdist(6, ClassDistribution({0.2, 0.3, 0.5}));
  EXPECT_NEAR(three.variance, 901.0 / 37500.0, 1e-14);
  EXPECT_NEAR(three.expected_agreement, 19.0 / 50.0, 1e-15);
}

TEST(VarianceClassDist, MatchesCompositionOracle) {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int classes = 2 + trial % 4;
    std::vector<double> p(classes);
    double sum = 0;
    for (double& v : p) sum += (v = unit(rng) + (trial % 7 == 0 ? 0.0 : 0.05));
    for (double& v : p) v /= sum;
    const ClassDistribution dist(p, 1e-9);
    for (int n = 2; n <= 10; ++n) {
      const auto m = composition_moments(n, std::vector<double>(
                                                dist.probs().begin(),
                                                dist.probs().end()));
      const auto r = item_variance_classdist(n, dist);
      EXPECT_NEAR(r.variance, static_cast<double>(m.variance), 1e-12)
          << "n=" << n << " C=" << classes;
      EXPECT_NEAR(r.expected_agreement, expected_chance_agreement(dist), 1e-12);
    }
  }
}

TEST(VarianceClassDist, EmptyClassesAreIgnored) {
  const ClassDistribution padded({0.5, 0.0, 0.5, 0.0});
  for (std::int64_t n = 2; n <= 9; ++n) {
    EXPECT_NEAR(item_variance_classdist(n, padded).variance,
                item_variance_uniform(n, 2).variance, 1e-13);
  }
}

TEST(VarianceClassDist, DegenerateIsZero) {
  const ClassDistribution point({0.0, 1.0, 0.0});
  for (std::int64_t n = 2; n <= 8; ++n) {
    const auto r = item_variance_classdist(n, point);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_DOUBLE_EQ(r.expected_agreement, 1.0);
  }
  EXPECT_TRUE(item_variance_classdist(1, point).infinite());
}

TEST(EnumerateVariance, AgreesWithCompositions) {
  const ClassDistribution dist({0.1, 0.6, 0.3});
  for (int n = 2; n <= 8; ++n) {
    const auto m = composition_moments(n, {0.1, 0.6, 0.3});
    EXPECT_NEAR(enumerate_variance(n, dist).variance,
                static_cast<double>(m.variance), 1e-13);
  }
}

TEST(EnumerateVariance, Guards) {
  EXPECT_EQ(error_of([] { enumerate_variance(1, ClassDistribution::uniform(2)); }),
            ErrorCode::kUndefinedAgreement);
  EXPECT_EQ(error_of([] { enumerate_variance(30, ClassDistribution::uniform(3)); }),
            ErrorCode::kEnumerationTooLarge);
}

TEST(UniformSpecialCase, ClassDistReducesToUniform) {
  for (std::int64_t n = 2; n <= 40; ++n) {
    for (std::size_t c = 2; c <= 7; ++c) {
      EXPECT_NEAR(item_variance_classdist(n, ClassDistribution::uniform(c))
                      .variance,
                  item_variance_uniform(n, static_cast<std::int64_t>(c)).variance,
                  1e-12)
          << "n=" << n << " C=" << c;
    }
  }
}

TEST(ComputeWeights, Examples) {
  const std::vector<ItemCounts> inv{{1, 0}, {1, 1}};
  const auto w = compute_weights(WeightScheme::inv_var(2), inv);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[1], 4.0, 1e-12);

  const std::vector<ItemCounts> flat_items{{2, 0}, {1, 2}, {1, 0}};
  const auto flat = compute_weights(WeightScheme::simple(SchemeKind::kFlat),
                                    flat_items);
  EXPECT_EQ(flat.values, (std::vector<double>{1, 1, 0}));

  const std::vector<ItemCounts> edge_items{{2, 0}, {1, 2}, {2, 2}};
  const auto edge = compute_weights(WeightScheme::simple(SchemeKind::kEdge),
                                    edge_items);
  EXPECT_EQ(edge.values, (std::vector<double>{1, 3, 6}));
}

TEST(ComputeWeights, EveryWeightZeroBelowTwo) {
  const std::vector<ItemCounts> items{{0, 0, 0}, {0, 1, 0}, {2, 1, 0}};
  for (SchemeKind kind : kAllSchemeKinds) {
    WeightScheme scheme;
    scheme.kind = kind;
    const auto w = compute_weights(scheme, items);
    EXPECT_EQ(w[0], 0.0) << scheme_name(kind);
    EXPECT_EQ(w[1], 0.0) << scheme_name(kind);
    EXPECT_GT(w[2], 0.0) << scheme_name(kind);
    for (double v : w.values) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(ComputeWeights, ZeroVarianceUsesCap) {
  const std::vector<ItemCounts> items{{3, 0}, {2, 0}};
  auto scheme = WeightScheme::inv_var_class(ClassDistribution({1.0, 0.0}));
  auto w = compute_weights(scheme, items);
  EXPECT_EQ(w[0], WeightScheme::kDefaultZeroVarianceWeight);
  scheme.zero_variance_weight = 50.0;
  w = compute_weights(scheme, items);
  EXPECT_EQ(w[1], 50.0);
}

TEST(ComputeWeights, ResolvesFromTable) {
  const std::vector<ItemCounts> items{{3, 0, 0}, {1, 1, 0}, {0, 1, 1}};
  const auto inv = resolve_scheme(WeightScheme::inv_var(), items);
  ASSERT_TRUE(inv.num_classes);
  EXPECT_EQ(*inv.num_classes, 3);
  const auto cls = resolve_scheme(WeightScheme::inv_var_class(), items);
  ASSERT_TRUE(cls.class_dist);
  EXPECT_NEAR((*cls.class_dist)[0], 4.0 / 7.0, 1e-15);
  EXPECT_EQ(error_of([&] {
              resolve_scheme(
                  WeightScheme::inv_var_class(ClassDistribution({0.5, 0.5})),
                  items);
            }),
            ErrorCode::kInvalidDistribution);
  EXPECT_EQ(error_of([] {
              const std::vector<ItemCounts> one{{2}};
              compute_weights(WeightScheme::inv_var(), one);
            }),
            ErrorCode::kInvalidClassCount);
}

TEST(WeightCurve, Examples) {
  const auto edge = weight_curve(WeightScheme::simple(SchemeKind::kEdge), 1, 4);
  ASSERT_EQ(edge.size(), 4u);
  const double expected[] = {0.0, 1.0 / 6.0, 0.5, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(edge[i].n, static_cast<std::int64_t>(i + 1));
    EXPECT_NEAR(edge[i].normalized_weight, expected[i], 1e-15);
  }
  const auto flat = weight_curve(WeightScheme::simple(SchemeKind::kFlat), 1, 3);
  EXPECT_EQ(flat[0].normalized_weight, 0.0);
  EXPECT_EQ(flat[1].normalized_weight, 1.0);
  EXPECT_EQ(flat[2].normalized_weight, 1.0);
}

TEST(WeightCurve, Errors) {
  EXPECT_EQ(error_of([] {
              weight_curve(WeightScheme::simple(SchemeKind::kEdge), 1, 1);
            }),
            ErrorCode::kDegenerateCurve);
  EXPECT_EQ(error_of([] {
              weight_curve(WeightScheme::simple(SchemeKind::kEdge), 3, 2);
            }),
            ErrorCode::kUsage);
  EXPECT_EQ(error_of([] { weight_curve(WeightScheme::inv_var(), 1, 5); }),
            ErrorCode::kInvalidClassCount);
}

TEST(WeightCurve, InvVarInsensitiveToClassCount) {
  const auto base = weight_curve(WeightScheme::inv_var(2), 2, 10);
  for (std::int64_t c = 3; c <= 7; ++c) {
    const auto other = weight_curve(WeightScheme::inv_var(c), 2, 10);
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(other[i].normalized_weight / base[i].normalized_weight, 1.0,
                  1e-6);
    }
  }
}

TEST(WeightCurve, InvVarTracksEdge) {
  const auto inv = weight_curve(WeightScheme::inv_var(4), 1, 30);
  const auto edge = weight_curve(WeightScheme::simple(SchemeKind::kEdge), 1, 30);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    EXPECT_NEAR(inv[i].normalized_weight, edge[i].normalized_weight, 1e-9);
  }
}

TEST(WeightCurve, ScaleInvariant) {
  auto scheme = WeightScheme::inv_var_class(ClassDistribution({0.7, 0.2, 0.1}));
  const auto curve = weight_curve(scheme, 1, 12);
  double max_raw = 0.0;
  for (std::int64_t n = 1; n <= 12; ++n) {
    max_raw = std::max(max_raw, weight_for_n(scheme, n));
  }
  for (const auto& point : curve) {
    EXPECT_NEAR(point.normalized_weight,
                3.5 * weight_for_n(scheme, point.n) / (3.5 * max_raw), 1e-15);
    EXPECT_LE(point.normalized_weight, 1.0);
  }
}

TEST(VarianceCache, ConcurrentCallsAgree) {
  VarianceCache cache;
  const ClassDistribution dist({0.3, 0.3, 0.4});
  std::vector<std::vector<double>> seen(8);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < seen.size(); ++t) {
    workers.emplace_back([&, t] {
      for (std::int64_t n = 2; n <= 40; ++n) {
        seen[t].push_back(cache.uniform(n, 3).variance);
        seen[t].push_back(cache.classdist(n, dist).variance);
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& s : seen) EXPECT_EQ(s, seen[0]);
  EXPECT_EQ(cache.size(), 78u);
  EXPECT_EQ(cache.uniform(7, 3).variance, item_variance_uniform(7, 3).variance);
  cache.clear();
  EXPECT_EQ(cache.size(), 0u);
}

}  // namespace
}  // namespace spa
