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

#include "spa/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "spa/error.hpp"
#include "spa/metrics.hpp"

namespace spa {
namespace {

constexpr double kNegativeVarianceTolerance = 1e-12;
// The closed forms subtract E^2 from E[P^2]; extended precision keeps the
// difference accurate for n in the thousands.
using Real = long double;
constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

// log k! for k in [0, n], by running sums of log j.
std::vector<Real> log_factorials(std::int64_t n) {
  std::vector<Real> table(static_cast<std::size_t>(n) + 1, 0.0L);
  for (std::int64_t k = 2; k <= n; ++k) {
    table[k] = table[k - 1] + std::log(static_cast<Real>(k));
  }
  return table;
}

class LogBinomial {
 public:
  explicit LogBinomial(std::int64_t n) : log_fact_(log_factorials(n)) {}

  Real operator()(std::int64_t n, std::int64_t k) const {
    return log_fact_[n] - log_fact_[k] - log_fact_[n - k];
  }

 private:
  std::vector<Real> log_fact_;
};

// log(base^exponent) with 0^0 = 1.
Real log_pow(Real base, std::int64_t exponent) {
  if (exponent == 0) return 0.0L;
  if (base <= 0.0L) return kNegInf;
  return static_cast<Real>(exponent) * std::log(base);
}

Real pairs(std::int64_t c) { return static_cast<Real>(c * (c - 1)); }

VarianceResult finish(Real second_moment, double expected, std::int64_t n,
                      std::int64_t num_classes) {
  const Real e = expected;
  auto variance = static_cast<double>(second_moment - e * e);
  if (variance < 0.0) {
    if (variance < -kNegativeVarianceTolerance) {
      throw std::logic_error("negative item variance " +
                             std::to_string(variance));
    }
    variance = 0.0;
  }
  return {variance, expected, n, num_classes};
}

VarianceResult single_annotation(double expected, std::int64_t num_classes) {
  return {std::numeric_limits<double>::infinity(), expected, 1, num_classes};
}

void require_annotations(std::int64_t n) {
  if (n < 1) {
    throw Error(ErrorCode::kUndefinedAgreement,
                "item variance needs at least one annotation");
  }
}

}  // namespace

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kFlat: return "flat";
    case SchemeKind::kAnnotations: return "annotations";
    case SchemeKind::kAnnotationsM1: return "annotations_m1";
    case SchemeKind::kEdge: return "edge";
    case SchemeKind::kInvVar: return "inv_var";
    case SchemeKind::kInvVarClass: return "inv_var_class";
  }
  return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  for (SchemeKind kind : kAllSchemeKinds) {
    if (scheme_name(kind) == name) return kind;
  }
  throw Error(ErrorCode::kUsage,
              "unknown weighting scheme '" + std::string(name) + "'");
}

bool is_simple(SchemeKind kind) {
  return kind != SchemeKind::kInvVar && kind != SchemeKind::kInvVarClass;
}

WeightScheme WeightScheme::simple(SchemeKind kind) {
  if (!is_simple(kind)) {
    throw Error(ErrorCode::kUsage, std::string(scheme_name(kind)) +
                                       " is not a simple weighting scheme");
  }
  WeightScheme s;
  s.kind = kind;
  return s;
}

WeightScheme WeightScheme::inv_var(std::optional<std::int64_t> num_classes) {
  WeightScheme s;
  s.kind = SchemeKind::kInvVar;
  s.num_classes = num_classes;
  return s;
}

WeightScheme WeightScheme::inv_var_class(
    std::optional<ClassDistribution> dist) {
  WeightScheme s;
  s.kind = SchemeKind::kInvVarClass;
  s.class_dist = std::move(dist);
  return s;
}

bool VarianceResult::infinite() const noexcept { return std::isinf(variance); }

double simple_weight(SchemeKind kind, std::int64_t n) {
  if (n < 2) return 0.0;
  const auto nd = static_cast<double>(n);
  switch (kind) {
    case SchemeKind::kFlat: return 1.0;
    case SchemeKind::kAnnotations: return nd;
    case SchemeKind::kAnnotationsM1: return nd - 1.0;
    case SchemeKind::kEdge: return nd * (nd - 1.0) / 2.0;
    default:
      throw Error(ErrorCode::kUsage, std::string(scheme_name(kind)) +
                                         " is not a simple weighting scheme");
  }
}

VarianceResult item_variance_uniform(std::int64_t n,
                                     std::int64_t num_classes) {
  if (num_classes < 2) {
    throw Error(ErrorCode::kInvalidClassCount,
                "inv_var needs C >= 2, got " + std::to_string(num_classes));
  }
  require_annotations(n);
  const auto classes = static_cast<Real>(num_classes);
  const double expected = 1.0 / static_cast<double>(num_classes);
  if (n == 1) return single_annotation(expected, num_classes);

  const LogBinomial log_binom(n);
  const Real log_cn = static_cast<Real>(n) * std::log(classes);
  const auto edges = static_cast<Real>(possible_edges(n));
  const Real norm = 4.0 * edges * edges;

  // Self-pair sum: K_sps(n_c) = binom(n, n_c) C (C - 1)^(n - n_c).
  Real self_pairs = 0.0L;
  for (std::int64_t nc = 2; nc <= n; ++nc) {
    const Real log_k = log_binom(n, nc) + std::log(classes) +
                         log_pow(classes - 1.0, n - nc) - log_cn;
    self_pairs += std::exp(log_k) * pairs(nc) * pairs(nc);
  }

  // Cross-pair sum over n1 <= min(n0, n - n0), doubled when n0 != n1:
  // K_csp(n0, n1) = binom(n, n0) binom(n - n0, n1) C (C - 1) (C - 2)^rest.
  Real cross_pairs = 0.0L;
  const Real log_ordered_classes = std::log(classes * (classes - 1.0L));
  for (std::int64_t n0 = 2; n0 <= n; ++n0) {
    const std::int64_t top = std::min(n0, n - n0);
    for (std::int64_t n1 = 2; n1 <= top; ++n1) {
      const Real log_rest = log_pow(classes - 2.0L, n - n0 - n1);
      if (log_rest == kNegInf) continue;
      const Real log_k = log_binom(n, n0) + log_binom(n - n0, n1) +
                           log_ordered_classes + log_rest - log_cn;
      const Real multiplicity = n0 != n1 ? 2.0L : 1.0L;
      cross_pairs += multiplicity * std::exp(log_k) * pairs(n0) * pairs(n1);
    }
  }

  return finish((self_pairs + cross_pairs) / norm, expected, n, num_classes);
}

VarianceResult item_variance_classdist(std::int64_t n,
                                       const ClassDistribution& dist) {
  if (dist.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "empty class distribution");
  }
  require_annotations(n);
  const auto num_classes = static_cast<std::int64_t>(dist.size());
  const double expected = expected_chance_agreement(dist);
  if (n == 1) return single_annotation(expected, num_classes);

  const LogBinomial log_binom(n);
  const auto edges = static_cast<Real>(possible_edges(n));
  const Real norm = 4.0 * edges * edges;
  const auto probs = dist.probs();

  // Self-pair sum with binomial p(n_c).
  Real self_pairs = 0.0L;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    for (std::int64_t nc = 2; nc <= n; ++nc) {
      const Real log_p = log_binom(n, nc) + log_pow(probs[c], nc) +
                           log_pow(1.0L - probs[c], n - nc);
      if (log_p == kNegInf) continue;
      self_pairs += std::exp(log_p) * pairs(nc) * pairs(nc);
    }
  }

  // Cross-pair sum over ordered class pairs with trinomial p(n_c, n_c').
  // The summand is symmetric in (c, c'), so each unordered pair counts twice.
  Real cross_pairs = 0.0L;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    for (std::size_t d = c + 1; d < probs.size(); ++d) {
      const Real rest = std::max<Real>(
          0.0L, 1.0L - static_cast<Real>(probs[c]) - static_cast<Real>(probs[d]));
      Real pair_sum = 0.0L;
      for (std::int64_t nc = 2; nc <= n; ++nc) {
        const Real log_first = log_binom(n, nc) + log_pow(probs[c], nc);
        if (log_first == kNegInf) continue;
        for (std::int64_t nd = 2; nd <= n - nc; ++nd) {
          const Real log_p = log_first + log_binom(n - nc, nd) +
                               log_pow(probs[d], nd) +
                               log_pow(rest, n - nc - nd);
          if (log_p == kNegInf) continue;
          pair_sum += std::exp(log_p) * pairs(nc) * pairs(nd);
        }
      }
      cross_pairs += 2.0L * pair_sum;
    }
  }

  return finish((self_pairs + cross_pairs) / norm, expected, n, num_classes);
}

VarianceResult enumerate_variance(std::int64_t n,
                                  const ClassDistribution& dist) {
  if (n < 2) {
    throw Error(ErrorCode::kUndefinedAgreement,
                "enumeration needs at least two annotations");
  }
  if (dist.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "empty class distribution");
  }
  const auto num_classes = static_cast<std::int64_t>(dist.size());
  std::int64_t outcomes = 1;
  for (std::int64_t i = 0; i < n; ++i) {
    outcomes *= num_classes;
    if (outcomes > kMaxEnumeration) {
      throw Error(ErrorCode::kEnumerationTooLarge,
                  "C^n exceeds " + std::to_string(kMaxEnumeration) +
                      " annotation sequences");
    }
  }

  // Depth-first walk over every annotation sequence, carrying the sequence
  // probability and the running count of agreeing ordered pairs. Adding an
  // annotation of class c to a class that already holds m adds 2m pairs.
  const auto probs = dist.probs();
  const double ordered_pairs_total = static_cast<double>(n * (n - 1));
  std::vector<std::int64_t> counts(probs.size(), 0);
  long double first = 0.0L;
  long double second = 0.0L;

  auto walk = [&](auto&& self, std::int64_t depth, double prob,
                  std::int64_t agreeing) -> void {
    if (depth == n) {
      const double p_hat = static_cast<double>(agreeing) / ordered_pairs_total;
      first += static_cast<long double>(prob) * p_hat;
      second += static_cast<long double>(prob) * p_hat * p_hat;
      return;
    }
    for (std::size_t c = 0; c < probs.size(); ++c) {
      if (probs[c] == 0.0) continue;
      const std::int64_t added = 2 * counts[c];
      ++counts[c];
      self(self, depth + 1, prob * probs[c], agreeing + added);
      --counts[c];
    }
  };
  walk(walk, 0, 1.0, 0);

  return finish(static_cast<double>(second), static_cast<double>(first), n,
                num_classes);
}

VarianceResult VarianceCache::uniform(std::int64_t n,
                                      std::int64_t num_classes) {
  const auto key = std::make_pair(n, num_classes);
  {
    std::shared_lock lock(mutex_);
    if (auto it = uniform_.find(key); it != uniform_.end()) return it->second;
  }
  const VarianceResult result = item_variance_uniform(n, num_classes);
  std::unique_lock lock(mutex_);
  return uniform_.emplace(key, result).first->second;
}

VarianceResult VarianceCache::classdist(std::int64_t n,
                                        const ClassDistribution& dist) {
  auto key = std::make_pair(
      n, std::vector<double>(dist.probs().begin(), dist.probs().end()));
  {
    std::shared_lock lock(mutex_);
    if (auto it = classdist_.find(key); it != classdist_.end()) {
      return it->second;
    }
  }
  const VarianceResult result = item_variance_classdist(n, dist);
  std::unique_lock lock(mutex_);
  return classdist_.emplace(std::move(key), result).first->second;
}

std::size_t VarianceCache::size() const {
  std::shared_lock lock(mutex_);
  return uniform_.size() + classdist_.size();
}

void VarianceCache::clear() {
  std::unique_lock lock(mutex_);
  uniform_.clear();
  classdist_.clear();
}

VarianceCache& VarianceCache::shared() {
  static VarianceCache cache;
  return cache;
}

WeightScheme resolve_scheme(const WeightScheme& scheme,
                            std::span<const ItemCounts> items) {
  WeightScheme resolved = scheme;
  const std::optional<std::size_t> table_classes =
      items.empty() ? std::nullopt
                    : std::optional<std::size_t>(items.front().num_classes());

  if (resolved.kind == SchemeKind::kInvVar) {
    if (!resolved.num_classes && table_classes) {
      resolved.num_classes = static_cast<std::int64_t>(*table_classes);
    }
    if (!resolved.num_classes || *resolved.num_classes < 2) {
      throw Error(ErrorCode::kInvalidClassCount,
                  "inv_var needs at least 2 classes");
    }
  } else if (resolved.kind == SchemeKind::kInvVarClass) {
    if (!resolved.class_dist) {
      if (items.empty()) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "inv_var_class needs a class distribution");
      }
      resolved.class_dist = class_distribution(items);
    }
    if (table_classes && resolved.class_dist->size() != *table_classes) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "class distribution has " +
                      std::to_string(resolved.class_dist->size()) +
                      " classes but the table has " +
                      std::to_string(*table_classes));
    }
  }
  if (!(resolved.zero_variance_weight > 0.0) ||
      !std::isfinite(resolved.zero_variance_weight)) {
    throw Error(ErrorCode::kInvalidWeights,
                "zero-variance weight cap must be positive and finite");
  }
  return resolved;
}

double weight_for_n(const WeightScheme& resolved, std::int64_t n,
                    VarianceCache& cache) {
  if (n < 2) return 0.0;
  if (is_simple(resolved.kind)) return simple_weight(resolved.kind, n);

  VarianceResult v;
  if (resolved.kind == SchemeKind::kInvVar) {
    if (!resolved.num_classes) {
      throw Error(ErrorCode::kInvalidClassCount, "inv_var needs C");
    }
    v = cache.uniform(n, *resolved.num_classes);
  } else {
    if (!resolved.class_dist) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "inv_var_class needs a class distribution");
    }
    v = cache.classdist(n, *resolved.class_dist);
  }
  if (v.infinite()) return 0.0;
  if (v.variance == 0.0) return resolved.zero_variance_weight;
  return 1.0 / v.variance;
}

WeightVector compute_weights(const WeightScheme& scheme,
                             std::span<const ItemCounts> items,
                             VarianceCache& cache) {
  const WeightScheme resolved = resolve_scheme(scheme, items);
  WeightVector weights;
  weights.values.reserve(items.size());
  std::map<std::int64_t, double> by_n;
  for (const auto& item : items) {
    auto it = by_n.find(item.n());
    if (it == by_n.end()) {
      it = by_n.emplace(item.n(), weight_for_n(resolved, item.n(), cache))
               .first;
    }
    weights.values.push_back(it->second);
  }
  return weights;
}

std::vector<WeightCurvePoint> weight_curve(const WeightScheme& scheme,
                                           std::int64_t n_min,
                                           std::int64_t n_max,
                                           VarianceCache& cache) {
  if (n_min < 1 || n_max < n_min) {
    throw Error(ErrorCode::kUsage, "weight curve range must satisfy "
                                   "1 <= n_min <= n_max");
  }
  const WeightScheme resolved = resolve_scheme(scheme, {});
  std::vector<WeightCurvePoint> curve;
  double max_weight = 0.0;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    const double w = weight_for_n(resolved, n, cache);
    curve.push_back({n, w});
    max_weight = std::max(max_weight, w);
  }
  if (max_weight <= 0.0) {
    throw Error(ErrorCode::kDegenerateCurve,
                "every weight in the requested range is zero");
  }
  for (auto& point : curve) point.normalized_weight /= max_weight;
  return curve;
}

}  // namespace spa
