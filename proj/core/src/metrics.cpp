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

#include "spa/metrics.hpp"

#include <cmath>
#include <string>

#include "spa/error.hpp"

namespace spa {
namespace {

void require_pairable(const ItemCounts& counts) {
  if (counts.n() < 2) {
    throw Error(ErrorCode::kUndefinedAgreement,
                "item agreement is undefined for n = " +
                    std::to_string(counts.n()) + " (< 2 annotations)");
  }
}

void require_full_annotation(std::span<const ItemCounts> items) {
  if (items.empty()) {
    throw Error(ErrorCode::kEmptyTable, "no items");
  }
  for (const auto& item : items) require_pairable(item);
  if (!equal_depth(items)) {
    throw Error(ErrorCode::kFullAnnotationViolation,
                "items have unequal annotation counts; use spa() with a "
                "weighting scheme for sparse tables");
  }
}

// sum_c n_c (n_c - 1)
std::int64_t agreeing_ordered_pairs(const ItemCounts& counts) {
  std::int64_t sum = 0;
  for (std::int64_t c : counts.counts()) sum += c * (c - 1);
  return sum;
}

}  // namespace

double item_agreement(const ItemCounts& counts) {
  require_pairable(counts);
  const auto n = static_cast<double>(counts.n());
  return static_cast<double>(agreeing_ordered_pairs(counts)) / (n * (n - 1.0));
}

std::int64_t edge_count(const ItemCounts& counts) {
  return agreeing_ordered_pairs(counts) / 2;
}

std::int64_t possible_edges(std::int64_t n) {
  return n < 2 ? 0 : n * (n - 1) / 2;
}

bool equal_depth(std::span<const ItemCounts> items) {
  for (const auto& item : items) {
    if (item.n() != items.front().n()) return false;
  }
  return true;
}

double joint_pa(std::span<const ItemCounts> items) {
  require_full_annotation(items);
  double sum = 0.0;
  for (const auto& item : items) sum += item_agreement(item);
  return sum / static_cast<double>(items.size());
}

ClassDistribution class_distribution(std::span<const ItemCounts> items) {
  std::vector<double> totals;
  std::int64_t total = 0;
  for (const auto& item : items) {
    if (totals.size() < item.num_classes()) totals.resize(item.num_classes());
    for (std::size_t c = 0; c < item.num_classes(); ++c) {
      totals[c] += static_cast<double>(item.count(c));
    }
    total += item.n();
  }
  if (total == 0) {
    throw Error(ErrorCode::kEmptyTable,
                "class distribution needs at least one annotation");
  }
  for (double& t : totals) t /= static_cast<double>(total);
  return ClassDistribution(std::move(totals));
}

double expected_chance_agreement(const ClassDistribution& dist) {
  double sum = 0.0;
  for (double p : dist.probs()) sum += p * p;
  return sum;
}

double fleiss_kappa(std::span<const ItemCounts> items) {
  const double observed = joint_pa(items);
  const double chance = expected_chance_agreement(class_distribution(items));
  if (chance >= 1.0) {
    throw Error(ErrorCode::kZeroChanceDenominator,
                "all annotations share one class; chance agreement is 1");
  }
  return (observed - chance) / (1.0 - chance);
}

double spa(std::span<const ItemCounts> items, std::span<const double> weights) {
  if (weights.size() != items.size()) {
    throw Error(ErrorCode::kInvalidWeights,
                "weight vector has " + std::to_string(weights.size()) +
                    " entries for " + std::to_string(items.size()) + " items");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double k = weights[i];
    if (!std::isfinite(k) || k < 0.0) {
      throw Error(ErrorCode::kInvalidWeights,
                  "weights must be finite and non-negative");
    }
    if (k == 0.0) continue;
    if (!items[i].pairable()) {
      throw Error(ErrorCode::kInvalidWeights,
                  "item " + std::to_string(i) +
                      " has fewer than 2 annotations but a non-zero weight");
    }
    weighted += k * item_agreement(items[i]);
    total += k;
  }
  if (total <= 0.0) {
    throw Error(ErrorCode::kNoComputableItems,
                "no item has both >= 2 annotations and a positive weight");
  }
  return weighted / total;
}

double observed_disagreement_nominal(std::span<const ItemCounts> items) {
  // D_o = (1/U) sum_i n_i / (n_i (n_i - 1)) sum_c sum_{k != c} x_cki, where
  // x_cki = n_ic n_ik counts ordered disagreeing pairs.
  double disagreement = 0.0;
  double pairable_values = 0.0;
  for (const auto& item : items) {
    if (!item.pairable()) continue;
    const auto counts = item.counts();
    double mismatched = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k != c) {
          mismatched += static_cast<double>(counts[c]) *
                        static_cast<double>(counts[k]);
        }
      }
    }
    const auto n = static_cast<double>(item.n());
    disagreement += n / (n * (n - 1.0)) * mismatched;
    pairable_values += n;
  }
  if (pairable_values == 0.0) {
    throw Error(ErrorCode::kNoComputableItems,
                "no item has at least 2 annotations");
  }
  return disagreement / pairable_values;
}

}  // namespace spa
