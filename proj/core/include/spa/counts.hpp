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
#include <initializer_list>
#include <span>
#include <vector>

namespace spa {

/// Per-item class counts n_ic together with the item's annotation total n_i.
/// This is the sufficient statistic for every agreement metric in the library.
class ItemCounts {
 public:
  ItemCounts() = default;
  explicit ItemCounts(std::vector<std::int64_t> counts);
  ItemCounts(std::initializer_list<std::int64_t> counts)
      : ItemCounts(std::vector<std::int64_t>(counts)) {}

  // An item with `num_classes` zero counts.
  static ItemCounts zeros(std::size_t num_classes);

  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::int64_t count(std::size_t c) const { return counts_.at(c); }
  std::int64_t n() const noexcept { return n_; }
  std::size_t num_classes() const noexcept { return counts_.size(); }

  // Pairable items have at least two annotations.
  bool pairable() const noexcept { return n_ >= 2; }

  void increment(std::size_t c);
  void decrement(std::size_t c);

  friend bool operator==(const ItemCounts&, const ItemCounts&) = default;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t n_ = 0;
};

/// Probability vector p_c over C classes.
class ClassDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  ClassDistribution() = default;
  // Throws kInvalidDistribution unless every entry is in [0, 1] and the sum
  // is within `tolerance` of 1.
  explicit ClassDistribution(std::vector<double> probs,
                             double tolerance = kSumTolerance);

  static ClassDistribution uniform(std::size_t num_classes);

  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t c) const { return probs_.at(c); }
  std::size_t size() const noexcept { return probs_.size(); }
  bool empty() const noexcept { return probs_.empty(); }

  friend bool operator==(const ClassDistribution&,
                         const ClassDistribution&) = default;

 private:
  std::vector<double> probs_;
};

}  // namespace spa
