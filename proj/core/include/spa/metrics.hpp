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
#include <span>

#include "spa/counts.hpp"

// Agreement metrics over per-item class counts. All functions are pure.
namespace spa {

/// Fraction of agreeing annotation pairs on one item:
/// sum_c n_c (n_c - 1) / (n (n - 1)). Throws kUndefinedAgreement for n < 2.
double item_agreement(const ItemCounts& counts);

/// Number of same-label pairs, sum_c n_c (n_c - 1) / 2.
std::int64_t edge_count(const ItemCounts& counts);

/// Number of possible pairs, n (n - 1) / 2.
std::int64_t possible_edges(std::int64_t n);

// True when every item has the same annotation count.
bool equal_depth(std::span<const ItemCounts> items);

/// Unweighted mean item agreement of a fully annotated table.
/// Throws kUndefinedAgreement if some n_i < 2 and kFullAnnotationViolation
/// when the n_i differ (use spa() for sparse tables).
double joint_pa(std::span<const ItemCounts> items);

/// p_c = sum_i n_ic / sum_i n_i. Throws kEmptyTable with no annotations.
ClassDistribution class_distribution(std::span<const ItemCounts> items);

/// Chance agreement sum_c p_c^2.
double expected_chance_agreement(const ClassDistribution& dist);

/// Fleiss' kappa for equal-depth tables. Throws kZeroChanceDenominator when
/// all annotations fall into one class.
double fleiss_kappa(std::span<const ItemCounts> items);

/// Weighted mean of item agreements over pairable items,
/// sum_i k_i P_i / sum_i k_i.
///
/// `weights` must align with `items`, be finite and non-negative, and be zero
/// for every item with n_i < 2 (kInvalidWeights otherwise). Throws
/// kNoComputableItems when the weights sum to zero.
double spa(std::span<const ItemCounts> items, std::span<const double> weights);

/// Nominal Krippendorff-style observed disagreement over pairable items.
/// 1 - D_o equals spa() with k_i = n_i.
double observed_disagreement_nominal(std::span<const ItemCounts> items);

}  // namespace spa
