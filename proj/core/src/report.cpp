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

#include "spa/report.hpp"

#include <string>

#include "spa/error.hpp"
#include "spa/metrics.hpp"

namespace spa {

std::optional<double> AgreementReport::spa_for(std::string_view scheme) const {
  for (const auto& [name, value] : spa_by_scheme) {
    if (name == scheme) return value;
  }
  return std::nullopt;
}

AgreementReport build_report(const AnnotationTable& table,
                             std::span<const WeightScheme> schemes) {
  const std::vector<ItemCounts> items = table.item_counts();
  AgreementReport report;
  report.class_distribution = class_distribution(items);
  report.observed_disagreement = observed_disagreement_nominal(items);

  std::vector<WeightVector> weights;
  weights.reserve(schemes.size());
  for (const auto& scheme : schemes) {
    weights.push_back(compute_weights(scheme, items));
    report.spa_by_scheme.emplace_back(std::string(scheme.name()),
                                      spa(items, weights.back().span()));
  }

  const auto ids = table.item_ids();
  for (std::size_t i = 0; i < items.size(); ++i) {
    ItemDiagnostics diag;
    diag.item_id = ids[i];
    diag.n = items[i].n();
    if (items[i].pairable()) {
      diag.agreement = item_agreement(items[i]);
    } else {
      ++report.items_excluded;
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      diag.weights.emplace_back(std::string(schemes[s].name()),
                                weights[s][i]);
    }
    report.per_item.push_back(std::move(diag));
  }

  if (report.items_excluded > 0) {
    report.fleiss_kappa_refusal =
        std::to_string(report.items_excluded) +
        " item(s) have fewer than 2 annotations; PA and Fleiss' kappa need "
        "every item fully annotated";
  } else if (!equal_depth(items)) {
    report.fleiss_kappa_refusal =
        "items have unequal annotation counts; Fleiss' kappa is only reported "
        "for equal-depth tables";
  } else {
    report.pa = joint_pa(items);
    if (expected_chance_agreement(report.class_distribution) >= 1.0) {
      report.fleiss_kappa_refusal =
          "all annotations share one class; chance agreement is 1";
    } else {
      report.fleiss_kappa = fleiss_kappa(items);
    }
  }
  return report;
}

}  // namespace spa
