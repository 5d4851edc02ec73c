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
#include <span>
#include <string>
#include <vector>

#include "spa/counts.hpp"

namespace spa {

struct AnnotationRecord {
  std::string item_id;
  std::string annotator_id;
  std::string label;

  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

/// Dense indices of one record into the table's item, annotator and label
/// dictionaries.
struct RecordIndex {
  std::uint32_t item = 0;
  std::uint32_t annotator = 0;
  std::uint32_t label = 0;

  friend bool operator==(const RecordIndex&, const RecordIndex&) = default;
};

/// Long-format sparse annotation dataset of (item, annotator, label) triples.
///
/// Items and annotators are indexed in order of first appearance. The label
/// universe is either supplied explicitly or the sorted set of observed
/// labels. Dictionaries are kept when records are removed, so an item whose
/// annotations have all been removed stays in the table with n_i = 0.
/// A table never holds two records for the same (item, annotator) pair.
class AnnotationTable {
 public:
  // Throws kEmptyTable for an empty record set, kDuplicate for a repeated
  // (item, annotator) pair and kFormat for a label outside an explicit
  // universe.
  static AnnotationTable from_records(
      std::vector<AnnotationRecord> records,
      std::optional<std::vector<std::string>> label_universe = std::nullopt);

  std::span<const AnnotationRecord> records() const noexcept {
    return records_;
  }
  std::span<const RecordIndex> record_indices() const noexcept {
    return indices_;
  }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::span<const std::string> label_universe() const noexcept {
    return labels_;
  }
  std::span<const std::string> item_ids() const noexcept { return items_; }
  std::span<const std::string> annotator_ids() const noexcept {
    return annotators_;
  }
  std::size_t num_items() const noexcept { return items_.size(); }
  std::size_t num_annotators() const noexcept { return annotators_.size(); }
  std::size_t num_classes() const noexcept { return labels_.size(); }

  std::optional<std::uint32_t> item_index(const std::string& item_id) const;
  std::optional<std::uint32_t> label_index(const std::string& label) const;

  // One ItemCounts per item, aligned with item_ids().
  std::vector<ItemCounts> item_counts() const;

  // Same dictionaries, keeping only the records at `keep` (ascending
  // positions into records()).
  AnnotationTable subset(std::span<const std::size_t> keep) const;

  friend bool operator==(const AnnotationTable&,
                         const AnnotationTable&) = default;

 private:
  std::vector<AnnotationRecord> records_;
  std::vector<RecordIndex> indices_;
  std::vector<std::string> labels_;
  std::vector<std::string> items_;
  std::vector<std::string> annotators_;
  std::map<std::string, std::uint32_t> label_lookup_;
  std::map<std::string, std::uint32_t> item_lookup_;
};

}  // namespace spa
