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

#include "spa/annotation_table.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "spa/error.hpp"

namespace spa {

AnnotationTable AnnotationTable::from_records(
    std::vector<AnnotationRecord> records,
    std::optional<std::vector<std::string>> label_universe) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyTable, "annotation table has no records");
  }

  AnnotationTable table;
  if (label_universe) {
    table.labels_ = std::move(*label_universe);
  } else {
    std::set<std::string> observed;
    for (const auto& r : records) observed.insert(r.label);
    table.labels_.assign(observed.begin(), observed.end());
  }
  for (std::uint32_t c = 0; c < table.labels_.size(); ++c) {
    if (!table.label_lookup_.emplace(table.labels_[c], c).second) {
      throw Error(ErrorCode::kFormat,
                  "label universe repeats '" + table.labels_[c] + "'");
    }
  }
  if (table.labels_.empty()) {
    throw Error(ErrorCode::kFormat, "label universe is empty");
  }

  std::map<std::string, std::uint32_t> annotator_lookup;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  table.indices_.reserve(records.size());
  for (const auto& r : records) {
    auto label = table.label_lookup_.find(r.label);
    if (label == table.label_lookup_.end()) {
      throw Error(ErrorCode::kFormat,
                  "label '" + r.label + "' is not in the label universe");
    }
    auto [item, item_added] = table.item_lookup_.emplace(
        r.item_id, static_cast<std::uint32_t>(table.items_.size()));
    if (item_added) table.items_.push_back(r.item_id);
    auto [annotator, annotator_added] = annotator_lookup.emplace(
        r.annotator_id, static_cast<std::uint32_t>(table.annotators_.size()));
    if (annotator_added) table.annotators_.push_back(r.annotator_id);

    if (!seen.emplace(item->second, annotator->second).second) {
      throw Error(ErrorCode::kDuplicate, "duplicate annotation for item '" +
                                             r.item_id + "' by annotator '" +
                                             r.annotator_id + "'");
    }
    table.indices_.push_back({item->second, annotator->second, label->second});
  }
  table.records_ = std::move(records);
  return table;
}

std::optional<std::uint32_t> AnnotationTable::item_index(
    const std::string& item_id) const {
  auto it = item_lookup_.find(item_id);
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> AnnotationTable::label_index(
    const std::string& label) const {
  auto it = label_lookup_.find(label);
  if (it == label_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<ItemCounts> AnnotationTable::item_counts() const {
  std::vector<ItemCounts> counts(items_.size(),
                                 ItemCounts::zeros(labels_.size()));
  for (const auto& idx : indices_) counts[idx.item].increment(idx.label);
  return counts;
}

AnnotationTable AnnotationTable::subset(
    std::span<const std::size_t> keep) const {
  AnnotationTable out;
  out.labels_ = labels_;
  out.items_ = items_;
  out.annotators_ = annotators_;
  out.label_lookup_ = label_lookup_;
  out.item_lookup_ = item_lookup_;
  out.records_.reserve(keep.size());
  out.indices_.reserve(keep.size());
  for (std::size_t pos : keep) {
    out.records_.push_back(records_.at(pos));
    out.indices_.push_back(indices_[pos]);
  }
  return out;
}

}  // namespace spa
