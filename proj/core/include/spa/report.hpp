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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spa/annotation_table.hpp"
#include "spa/counts.hpp"
#include "spa/weighting.hpp"

namespace spa {

struct ItemDiagnostics {
  std::string item_id;
  std::int64_t n = 0;
  std::optional<double> agreement;  // absent for n < 2
  std::vector<std::pair<std::string, double>> weights;  // scheme order
};

/// Everything `compute` reports for one table. Scheme-keyed entries keep the
/// order of the requested schemes.
struct AgreementReport {
  std::optional<double> pa;
  std::vector<std::pair<std::string, double>> spa_by_scheme;
  std::optional<double> fleiss_kappa;
  // Set whenever fleiss_kappa (or pa) is absent.
  std::optional<std::string> fleiss_kappa_refusal;
  double observed_disagreement = 0.0;
  std::vector<ItemDiagnostics> per_item;
  std::int64_t items_excluded = 0;
  ClassDistribution class_distribution;

  std::optional<double> spa_for(std::string_view scheme) const;
};

/// Computes SPA under each scheme, plus PA and Fleiss' kappa when the table
/// has equal annotation depth. Unresolved inv_var / inv_var_class parameters
/// are taken from the table.
AgreementReport build_report(const AnnotationTable& table,
                             std::span<const WeightScheme> schemes);

}  // namespace spa
