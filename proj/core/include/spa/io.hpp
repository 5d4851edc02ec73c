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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spa/annotation_table.hpp"
#include "spa/report.hpp"
#include "spa/simulation.hpp"
#include "spa/weighting.hpp"

namespace spa {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class DuplicateResolution { kError, kFirst, kRandom };

std::string_view duplicate_resolution_name(DuplicateResolution d);
DuplicateResolution parse_duplicate_resolution(std::string_view name);

struct IngestPolicy {
  DuplicateResolution duplicate_resolution = DuplicateResolution::kError;
  std::uint64_t seed = 0;  // for kRandom
  std::optional<std::vector<std::string>> label_universe;
  // Items with fewer annotations than this produce a warning.
  std::int64_t min_annotations_warn = 2;
};

struct IngestResult {
  AnnotationTable table;
  std::vector<std::string> warnings;
  std::string digest;  // sha256 of the input bytes, hex
};

// RFC 4180 rows. Each row carries the 1-based line it starts on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);

/// Long format with header exactly `item_id,annotator_id,label`.
IngestResult ingest_csv(std::string_view text, const IngestPolicy& policy);
/// Matrix layout: header `item_id,<annotator>...`, one row per item, empty
/// cells for missing annotations.
IngestResult ingest_matrix_csv(std::string_view text,
                               const IngestPolicy& policy);
IngestResult ingest_file(const std::filesystem::path& path,
                         const IngestPolicy& policy, bool matrix = false);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames, so failures leave no partial
// output.
void write_file(const std::filesystem::path& path, std::string_view contents);

void write_table_csv(const AnnotationTable& table, std::ostream& out);

std::string sha256_hex(std::string_view bytes);

/// Object mapping label -> probability, summing to 1 within 1e-9. With a
/// universe the keys must match it exactly and probabilities follow its
/// order; otherwise keys are taken in sorted order.
ClassDistribution parse_class_distribution_json(
    std::string_view text,
    std::optional<std::span<const std::string>> universe = std::nullopt);

/// 12 significant digits, shortest form ("0.25", "0.254545454545").
std::string format_number(double value);
/// `value` rounded to 12 significant digits.
double round_significant(double value);

struct Provenance {
  std::string input_digest;
  std::string tool_version{kToolVersion};
  IngestPolicy policy;
  // ISO-8601 UTC; taken from SOURCE_DATE_EPOCH so outputs stay reproducible,
  // null when unset.
  std::optional<std::string> timestamp;
};

std::optional<std::string> timestamp_from_env();

struct ReportDocument {
  AgreementReport report;
  Provenance provenance;
  std::vector<std::string> warnings;
};

/// JSON with keys pa, spa_by_scheme, fleiss_kappa, observed_disagreement,
/// items_excluded, class_distribution, per_item, provenance, warnings.
/// Absent metrics are null, never omitted.
std::string report_to_json(const ReportDocument& doc,
                           std::span<const std::string> labels);
/// `metric,scheme,value` summary rows; absent values are empty.
std::string report_to_csv(const ReportDocument& doc);

/// `n,normalized_weight`
std::string weight_curve_csv(std::span<const WeightCurvePoint> curve);
/// `scheme,annotation_count,variance,variance_minus_flat`
std::string variance_curves_csv(std::span<const VarianceCurve> curves);

}  // namespace spa
