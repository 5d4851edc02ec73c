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

#include "spa/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "spa/error.hpp"

namespace spa {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxListedItems = 10;

std::string at_line(std::size_t line, const std::string& message) {
  return "line " + std::to_string(line) + ": " + message;
}

struct SourcedRecord {
  AnnotationRecord record;
  std::size_t line = 0;
};

std::string describe_pair(const AnnotationRecord& r) {
  return "(item '" + r.item_id + "', annotator '" + r.annotator_id + "')";
}

IngestResult build_table(std::vector<SourcedRecord> sourced,
                         const IngestPolicy& policy, std::string digest) {
  if (sourced.empty()) {
    throw Error(ErrorCode::kEmptyTable, "input has no annotation records");
  }
  IngestResult result;
  result.digest = std::move(digest);

  // Group records by (item, annotator) in order of first appearance.
  std::map<std::pair<std::string, std::string>, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sourced.size(); ++i) {
    const auto key = std::make_pair(sourced[i].record.item_id,
                                    sourced[i].record.annotator_id);
    auto [it, added] = group_of.emplace(key, groups.size());
    if (added) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  Rng rng(trial_seed(policy.seed, 0));
  std::vector<AnnotationRecord> records;
  records.reserve(groups.size());
  for (const auto& group : groups) {
    std::size_t chosen = group.front();
    if (group.size() > 1) {
      const auto& first = sourced[group.front()];
      switch (policy.duplicate_resolution) {
        case DuplicateResolution::kError:
          throw Error(ErrorCode::kDuplicate,
                      at_line(sourced[group[1]].line,
                              "duplicate annotation for " +
                                  describe_pair(first.record) +
                                  ", first seen on line " +
                                  std::to_string(first.line)));
        case DuplicateResolution::kFirst:
          result.warnings.push_back(
              "kept the first of " + std::to_string(group.size()) +
              " annotations for " + describe_pair(first.record) +
              " (line " + std::to_string(first.line) + ")");
          break;
        case DuplicateResolution::kRandom:
          chosen = group[uniform_index(rng, group.size())];
          result.warnings.push_back(
              "randomly kept 1 of " + std::to_string(group.size()) +
              " annotations for " + describe_pair(first.record) +
              " (line " + std::to_string(sourced[chosen].line) + ")");
          break;
      }
    }
    records.push_back(std::move(sourced[chosen].record));
  }

  result.table =
      AnnotationTable::from_records(std::move(records), policy.label_universe);

  const auto counts = result.table.item_counts();
  std::vector<std::string> sparse;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].n() < policy.min_annotations_warn) {
      sparse.push_back(std::string(result.table.item_ids()[i]));
    }
  }
  if (!sparse.empty()) {
    std::string message = std::to_string(sparse.size()) +
                          " item(s) have fewer than " +
                          std::to_string(policy.min_annotations_warn) +
                          " annotations: ";
    for (std::size_t i = 0; i < std::min(sparse.size(), kMaxListedItems); ++i) {
      if (i > 0) message += ", ";
      message += sparse[i];
    }
    if (sparse.size() > kMaxListedItems) message += ", ...";
    result.warnings.push_back(std::move(message));
  }
  return result;
}

std::string_view strip_bom(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  return text;
}

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string csv_field(std::string_view field) {
  if (!needs_quoting(field)) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string policy_summary(const IngestPolicy& policy) {
  return std::string(duplicate_resolution_name(policy.duplicate_resolution));
}

ordered_json number_or_null(const std::optional<double>& value) {
  if (!value || !std::isfinite(*value)) return nullptr;
  return round_significant(*value);
}

}  // namespace

std::string_view duplicate_resolution_name(DuplicateResolution d) {
  switch (d) {
    case DuplicateResolution::kError: return "error";
    case DuplicateResolution::kFirst: return "first";
    case DuplicateResolution::kRandom: return "random";
  }
  return "error";
}

DuplicateResolution parse_duplicate_resolution(std::string_view name) {
  if (name == "error") return DuplicateResolution::kError;
  if (name == "first") return DuplicateResolution::kFirst;
  if (name == "random") return DuplicateResolution::kRandom;
  throw Error(ErrorCode::kUsage,
              "unknown duplicate resolution '" + std::string(name) + "'");
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  text = strip_bom(text);
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  row.line = 1;
  bool in_quotes = false;
  bool quoted_field = false;  // current field was quoted
  bool row_has_content = false;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    quoted_field = false;
  };
  auto end_row = [&] {
    end_field();
    // A bare empty line is not a record.
    if (row_has_content || row.fields.size() > 1 || !row.fields[0].empty()) {
      rows.push_back(std::move(row));
    }
    row = CsvRow{};
    row.line = line;
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || quoted_field) {
          throw Error(ErrorCode::kFormat,
                      at_line(line, "unexpected quote inside a field"));
        }
        in_quotes = true;
        quoted_field = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        ++line;
        end_row();
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        if (quoted_field) {
          throw Error(ErrorCode::kFormat,
                      at_line(line, "characters after a closing quote"));
        }
        field += c;
        break;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kFormat, at_line(row.line, "unterminated quote"));
  }
  if (!field.empty() || quoted_field || !row.fields.empty()) end_row();
  return rows;
}

IngestResult ingest_csv(std::string_view text, const IngestPolicy& policy) {
  const auto rows = parse_csv(text);
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyTable, "input is empty");
  }
  const std::vector<std::string> expected = {"item_id", "annotator_id",
                                             "label"};
  if (rows.front().fields != expected) {
    throw Error(ErrorCode::kFormat,
                at_line(rows.front().line,
                        "header must be exactly item_id,annotator_id,label"));
  }
  std::vector<SourcedRecord> sourced;
  sourced.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3) {
      throw Error(ErrorCode::kFormat,
                  at_line(row.line, "expected 3 fields, found " +
                                        std::to_string(row.fields.size())));
    }
    for (const auto& f : row.fields) {
      if (f.empty()) {
        throw Error(ErrorCode::kFormat, at_line(row.line, "empty field"));
      }
    }
    sourced.push_back({{row.fields[0], row.fields[1], row.fields[2]}, row.line});
  }
  return build_table(std::move(sourced), policy, sha256_hex(text));
}

IngestResult ingest_matrix_csv(std::string_view text,
                               const IngestPolicy& policy) {
  const auto rows = parse_csv(text);
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyTable, "input is empty");
  }
  const auto& header = rows.front().fields;
  if (header.size() < 2 || header.front() != "item_id") {
    throw Error(ErrorCode::kFormat,
                at_line(rows.front().line,
                        "matrix header must be item_id followed by annotator "
                        "columns"));
  }
  std::set<std::string> annotators;
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j].empty() || !annotators.insert(header[j]).second) {
      throw Error(ErrorCode::kFormat,
                  at_line(rows.front().line,
                          "annotator columns must be non-empty and unique"));
    }
  }
  std::vector<SourcedRecord> sourced;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw Error(ErrorCode::kFormat,
                  at_line(row.line, "expected " + std::to_string(header.size()) +
                                        " fields, found " +
                                        std::to_string(row.fields.size())));
    }
    if (row.fields.front().empty()) {
      throw Error(ErrorCode::kFormat, at_line(row.line, "empty item_id"));
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
      if (row.fields[j].empty()) continue;
      sourced.push_back(
          {{row.fields.front(), header[j], row.fields[j]}, row.line});
    }
  }
  return build_table(std::move(sourced), policy, sha256_hex(text));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot replace '" + path.string() + "'");
  }
}

IngestResult ingest_file(const std::filesystem::path& path,
                         const IngestPolicy& policy, bool matrix) {
  const std::string text = read_file(path);
  return matrix ? ingest_matrix_csv(text, policy) : ingest_csv(text, policy);
}

void write_table_csv(const AnnotationTable& table, std::ostream& out) {
  out << "item_id,annotator_id,label\n";
  for (const auto& r : table.records()) {
    out << csv_field(r.item_id) << ',' << csv_field(r.annotator_id) << ','
        << csv_field(r.label) << '\n';
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

ClassDistribution parse_class_distribution_json(
    std::string_view text, std::optional<std::span<const std::string>> universe) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat,
                std::string("class distribution is not valid JSON: ") +
                    e.what());
  }
  if (!doc.is_object() || doc.empty()) {
    throw Error(ErrorCode::kFormat,
                "class distribution must be a non-empty object mapping label "
                "to probability");
  }
  std::map<std::string, double> by_label;
  for (const auto& [label, value] : doc.items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::kFormat,
                  "probability for '" + label + "' is not a number");
    }
    by_label.emplace(label, value.get<double>());
  }

  std::vector<double> probs;
  if (universe) {
    if (universe->size() != by_label.size()) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "class distribution has " + std::to_string(by_label.size()) +
                      " labels but the table has " +
                      std::to_string(universe->size()));
    }
    for (const auto& label : *universe) {
      auto it = by_label.find(label);
      if (it == by_label.end()) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "class distribution is missing label '" + label + "'");
      }
      probs.push_back(it->second);
    }
  } else {
    for (const auto& [label, p] : by_label) probs.push_back(p);
  }
  return ClassDistribution(std::move(probs), 1e-9);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  std::string out(buffer);
  if (out == "-0") out = "0";
  return out;
}

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  const double rounded = std::strtod(buffer, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;
}

std::optional<std::string> timestamp_from_env() {
  const char* raw = std::getenv("SOURCE_DATE_EPOCH");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const long long seconds = std::strtoll(raw, &end, 10);
  if (*end != '\0' || seconds < 0) return std::nullopt;
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return std::string(buffer);
}

std::string report_to_json(const ReportDocument& doc,
                           std::span<const std::string> labels) {
  const AgreementReport& r = doc.report;
  ordered_json out;
  out["pa"] = number_or_null(r.pa);

  ordered_json spa_values = ordered_json::object();
  for (const auto& [scheme, value] : r.spa_by_scheme) {
    spa_values[scheme] = round_significant(value);
  }
  out["spa_by_scheme"] = std::move(spa_values);
  out["fleiss_kappa"] = number_or_null(r.fleiss_kappa);
  out["fleiss_kappa_refusal"] =
      r.fleiss_kappa_refusal ? ordered_json(*r.fleiss_kappa_refusal) : nullptr;
  out["observed_disagreement"] = round_significant(r.observed_disagreement);
  out["items_excluded"] = r.items_excluded;

  ordered_json dist = ordered_json::object();
  for (std::size_t c = 0; c < r.class_distribution.size(); ++c) {
    const std::string key =
        c < labels.size() ? labels[c] : "class_" + std::to_string(c);
    dist[key] = round_significant(r.class_distribution[c]);
  }
  out["class_distribution"] = std::move(dist);

  ordered_json items = ordered_json::array();
  for (const auto& item : r.per_item) {
    ordered_json entry;
    entry["item_id"] = item.item_id;
    entry["n"] = item.n;
    entry["agreement"] = number_or_null(item.agreement);
    ordered_json weights = ordered_json::object();
    for (const auto& [scheme, w] : item.weights) {
      weights[scheme] = round_significant(w);
    }
    entry["weights"] = std::move(weights);
    items.push_back(std::move(entry));
  }
  out["per_item"] = std::move(items);

  ordered_json provenance;
  provenance["input_digest"] = "sha256:" + doc.provenance.input_digest;
  provenance["tool_version"] = doc.provenance.tool_version;
  ordered_json policy;
  policy["duplicate_resolution"] = policy_summary(doc.provenance.policy);
  policy["seed"] = doc.provenance.policy.seed;
  policy["label_universe"] =
      doc.provenance.policy.label_universe
          ? ordered_json(*doc.provenance.policy.label_universe)
          : ordered_json(nullptr);
  policy["min_annotations_warn"] = doc.provenance.policy.min_annotations_warn;
  provenance["ingest_policy"] = std::move(policy);
  provenance["timestamp"] = doc.provenance.timestamp
                                ? ordered_json(*doc.provenance.timestamp)
                                : ordered_json(nullptr);
  out["provenance"] = std::move(provenance);
  out["warnings"] = doc.warnings;
  return out.dump(2) + "\n";
}

std::string report_to_csv(const ReportDocument& doc) {
  const AgreementReport& r = doc.report;
  auto optional_number = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  std::string out = "metric,scheme,value\n";
  out += "pa,," + optional_number(r.pa) + "\n";
  for (const auto& [scheme, value] : r.spa_by_scheme) {
    out += "spa," + csv_field(scheme) + "," + format_number(value) + "\n";
  }
  out += "fleiss_kappa,," + optional_number(r.fleiss_kappa) + "\n";
  out += "observed_disagreement,," + format_number(r.observed_disagreement) +
         "\n";
  out += "items_excluded,," + std::to_string(r.items_excluded) + "\n";
  return out;
}

std::string weight_curve_csv(std::span<const WeightCurvePoint> curve) {
  std::string out = "n,normalized_weight\n";
  for (const auto& p : curve) {
    out += std::to_string(p.n) + "," + format_number(p.normalized_weight) + "\n";
  }
  return out;
}

std::string variance_curves_csv(std::span<const VarianceCurve> curves) {
  std::string out = "scheme,annotation_count,variance,variance_minus_flat\n";
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      std::string delta;
      if (curve.baseline_delta) {
        for (const auto& d : *curve.baseline_delta) {
          if (d.annotation_count == p.annotation_count) {
            delta = format_number(d.variance_minus_flat);
            break;
          }
        }
      }
      out += csv_field(curve.scheme) + "," +
             std::to_string(p.annotation_count) + "," +
             format_number(p.variance) + "," + delta + "\n";
    }
  }
  return out;
}

}  // namespace spa
