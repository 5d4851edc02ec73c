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

#include "spa/counts.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "spa/error.hpp"

namespace spa {

ItemCounts::ItemCounts(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  for (std::int64_t c : counts_) {
    if (c < 0) {
      throw Error(ErrorCode::kFormat, "class counts must be non-negative");
    }
    n_ += c;
  }
}

ItemCounts ItemCounts::zeros(std::size_t num_classes) {
  return ItemCounts(std::vector<std::int64_t>(num_classes, 0));
}

void ItemCounts::increment(std::size_t c) {
  ++counts_.at(c);
  ++n_;
}

void ItemCounts::decrement(std::size_t c) {
  if (counts_.at(c) == 0) {
    throw Error(ErrorCode::kNothingToRemove,
                "class " + std::to_string(c) + " has no annotations");
  }
  --counts_[c];
  --n_;
}

ClassDistribution::ClassDistribution(std::vector<double> probs,
                                     double tolerance)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw Error(ErrorCode::kInvalidDistribution,
                "class distribution needs at least one class");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "class probabilities must lie in [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw Error(ErrorCode::kInvalidDistribution,
                "class probabilities sum to " + std::to_string(sum));
  }
}

ClassDistribution ClassDistribution::uniform(std::size_t num_classes) {
  if (num_classes == 0) {
    throw Error(ErrorCode::kInvalidClassCount, "need at least one class");
  }
  return ClassDistribution(std::vector<double>(
      num_classes, 1.0 / static_cast<double>(num_classes)));
}

}  // namespace spa
