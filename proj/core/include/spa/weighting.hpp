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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spa/counts.hpp"

namespace spa {

enum class SchemeKind {
  kFlat,
  kAnnotations,
  kAnnotationsM1,
  kEdge,
  kInvVar,
  kInvVarClass,
};

inline constexpr SchemeKind kAllSchemeKinds[] = {
    SchemeKind::kFlat,  SchemeKind::kAnnotations, SchemeKind::kAnnotationsM1,
    SchemeKind::kEdge,  SchemeKind::kInvVar,      SchemeKind::kInvVarClass,
};

std::string_view scheme_name(SchemeKind kind);
// Accepts the names produced by scheme_name(); kUsage otherwise.
SchemeKind parse_scheme_kind(std::string_view name);
bool is_simple(SchemeKind kind);

/// Item-weighting rule for SPA.
///
/// inv_var uses the class count C (taken from the table when unset);
/// inv_var_class uses a class distribution (estimated from the table when
/// unset). Items whose closed-form variance is exactly zero get
/// `zero_variance_weight` instead of an infinite weight.
struct WeightScheme {
  static constexpr double kDefaultZeroVarianceWeight = 1e12;

  SchemeKind kind = SchemeKind::kFlat;
  std::optional<ClassDistribution> class_dist;
  std::optional<std::int64_t> num_classes;
  double zero_variance_weight = kDefaultZeroVarianceWeight;

  static WeightScheme simple(SchemeKind kind);
  static WeightScheme inv_var(std::optional<std::int64_t> num_classes = {});
  static WeightScheme inv_var_class(
      std::optional<ClassDistribution> dist = {});

  std::string_view name() const { return scheme_name(kind); }
};

struct WeightVector {
  std::vector<double> values;

  std::span<const double> span() const noexcept { return values; }
  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values.at(i); }
};

/// Expected variance of the item agreement over all annotation outcomes.
/// `variance` is +infinity for a single annotation.
struct VarianceResult {
  double variance = 0.0;
  double expected_agreement = 0.0;
  std::int64_t n = 0;
  std::int64_t num_classes = 0;

  bool infinite() const noexcept;
};

/// flat: 1, annotations: n, annotations_m1: n - 1, edge: n (n - 1) / 2.
/// Zero for n < 2 under every scheme.
double simple_weight(SchemeKind kind, std::int64_t n);

/// Closed-form variance under uniform class choice, evaluated as the
/// triangular sum over (n0, n1) class-count pairs with doubling for n0 != n1.
/// O(n^2). Throws kInvalidClassCount for C < 2.
VarianceResult item_variance_uniform(std::int64_t n, std::int64_t num_classes);

/// Closed-form variance for a known class distribution (binomial self-pair
/// and trinomial cross-pair terms). O(n^2 C^2).
VarianceResult item_variance_classdist(std::int64_t n,
                                       const ClassDistribution& dist);

/// Ground truth by enumerating all C^n annotation sequences.
/// Throws kEnumerationTooLarge when C^n exceeds kMaxEnumeration.
inline constexpr std::int64_t kMaxEnumeration = 10'000'000;
VarianceResult enumerate_variance(std::int64_t n,
                                  const ClassDistribution& dist);

/// Thread-safe memo of closed-form variances keyed by (n, C) and
/// (n, distribution).
class VarianceCache {
 public:
  VarianceResult uniform(std::int64_t n, std::int64_t num_classes);
  VarianceResult classdist(std::int64_t n, const ClassDistribution& dist);

  std::size_t size() const;
  void clear();

  // Process-wide instance used when no cache is passed explicitly.
  static VarianceCache& shared();

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::int64_t, std::int64_t>, VarianceResult> uniform_;
  std::map<std::pair<std::int64_t, std::vector<double>>, VarianceResult>
      classdist_;
};

// Fills in the optional parameters of `scheme` from `items`: C for inv_var
// and the pooled class distribution for inv_var_class. Validates the result.
WeightScheme resolve_scheme(const WeightScheme& scheme,
                            std::span<const ItemCounts> items);

/// Weight of an item with `n` annotations under a resolved scheme.
double weight_for_n(const WeightScheme& resolved, std::int64_t n,
                    VarianceCache& cache = VarianceCache::shared());

/// One weight per item. Items with n_i < 2 always get 0; an all-zero vector
/// is allowed here and rejected later by spa().
WeightVector compute_weights(const WeightScheme& scheme,
                             std::span<const ItemCounts> items,
                             VarianceCache& cache = VarianceCache::shared());

struct WeightCurvePoint {
  std::int64_t n = 0;
  double normalized_weight = 0.0;
};

/// Weights for n in [n_min, n_max] divided by their maximum. inv_var needs
/// `num_classes` set and inv_var_class needs `class_dist` set.
/// Throws kDegenerateCurve if every raw weight is zero.
std::vector<WeightCurvePoint> weight_curve(
    const WeightScheme& scheme, std::int64_t n_min, std::int64_t n_max,
    VarianceCache& cache = VarianceCache::shared());

}  // namespace spa
