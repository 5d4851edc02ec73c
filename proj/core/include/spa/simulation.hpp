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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spa/annotation_table.hpp"
#include "spa/counts.hpp"
#include "spa/weighting.hpp"

// Monte Carlo harness: random annotation removal and subsampling, SPA
// unbiasedness checks and weighting-scheme variance comparison.
//
// Every trial draws from its own generator seeded by (master seed, trial
// index), and per-trial results are reduced in index order, so outputs do not
// depend on the thread count.
namespace spa {

using Rng = std::mt19937_64;

/// Seed of trial `trial` under `master_seed` (splitmix64 finalizer over both).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);
Rng make_trial_rng(std::uint64_t master_seed, std::uint64_t trial);

/// Uniform integer in [0, bound) by rejection; identical across platforms,
/// unlike std::uniform_int_distribution. `bound` must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);
/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

struct RemovalPolicy {
  enum class Kind { kUniformRandom, kItemBiased };

  Kind kind = Kind::kUniformRandom;
  // Per-item removal multipliers (item_biased only), aligned with item_ids().
  std::vector<double> bias;

  static RemovalPolicy uniform_random();
  static RemovalPolicy item_biased(std::vector<double> bias);

  // item_biased removal breaks the missingness-independence assumption.
  bool bias_inducing() const noexcept { return kind == Kind::kItemBiased; }
  std::string_view name() const noexcept;
};

/// Biases removal towards high-agreement items: multiplier 1 + strength * P_i
/// from the full table (1 for unpairable items).
std::vector<double> agreement_targeted_bias(const AnnotationTable& table,
                                            double strength);

struct SubsampleTarget {
  enum class Kind { kPerItem, kTotal };

  Kind kind = Kind::kTotal;
  std::int64_t value = 0;
  // Per-item mode only: keep at most this many (uniformly chosen) items.
  std::optional<std::int64_t> max_items;

  static SubsampleTarget per_item(std::int64_t k,
                                  std::optional<std::int64_t> max_items = {});
  static SubsampleTarget total(std::int64_t count);
};

struct TrialConfig {
  std::int64_t trials = 3000;
  std::uint64_t seed = 0;
  RemovalPolicy removal;
  SubsampleTarget target;
  std::vector<WeightScheme> schemes;
  // Budget gridpoints for variance_curves / constant_k_comparison.
  std::int64_t gridpoints = 12;
  unsigned threads = 1;
};

/// Drops one record chosen uniformly. Throws kNothingToRemove when empty.
AnnotationTable remove_one(const AnnotationTable& table, Rng& rng);

/// Per-item mode keeps only items with at least k records and samples exactly
/// k of each without replacement (throws kEmptyResult if no item qualifies).
/// Total mode keeps a uniform subset of exactly `value` records
/// (kEmptyResult if it exceeds the table size).
AnnotationTable subsample_to(const AnnotationTable& table,
                             const SubsampleTarget& target, Rng& rng);

struct UnbiasednessResult {
  std::string scheme;
  double mean = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
  std::int64_t trials_run = 0;
  std::int64_t trials_skipped = 0;
  bool bias_inducing = false;

  double deviation() const noexcept { return mean - reference; }
  // |mean - reference| <= sigmas * std_error.
  bool within(double sigmas) const noexcept;
};

/// Removes `removals` records per trial under cfg.removal, evaluates SPA and
/// compares the Monte Carlo mean with SPA on the full table. Weights are
/// recomputed from post-removal n_i; an inv_var_class distribution is fixed
/// from the full table. Trials with no computable item are skipped and
/// counted; kDegenerateExperiment if all are skipped.
UnbiasednessResult unbiasedness_experiment(const AnnotationTable& table,
                                           std::int64_t removals,
                                           const WeightScheme& scheme,
                                           const TrialConfig& cfg);

// All cfg.schemes evaluated on the same removal draws.
std::vector<UnbiasednessResult> unbiasedness_experiments(
    const AnnotationTable& table, std::int64_t removals,
    const TrialConfig& cfg);

struct CurvePoint {
  std::int64_t annotation_count = 0;
  double variance = 0.0;
  double mean = 0.0;
  std::int64_t trials_run = 0;
  std::int64_t trials_skipped = 0;
};

struct DeltaPoint {
  std::int64_t annotation_count = 0;
  double variance_minus_flat = 0.0;
};

struct VarianceCurve {
  std::string scheme;
  std::vector<CurvePoint> points;  // ascending annotation_count
  std::optional<std::vector<DeltaPoint>> baseline_delta;
  // Sum of baseline deltas over gridpoints; set with baseline_delta.
  std::optional<double> sum_under_curve;
};

/// Budgets log-spaced over [lo, hi], rounded and deduplicated.
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi,
                                   std::int64_t points);

/// Monte Carlo SPA variance per scheme at log-spaced total-annotation budgets
/// between 2 I and the table size. All schemes share the subsample drawn in
/// each trial; deltas are taken against a flat baseline.
std::vector<VarianceCurve> variance_curves(const AnnotationTable& table,
                                           const TrialConfig& cfg);

struct ConstantKResult {
  std::vector<VarianceCurve> curves;  // "k=<k>" curves, then "sparse_flat"
  std::vector<std::string> warnings;  // one per infeasible k
};

/// For each k, SPA variance when a growing number of items is kept at exactly
/// k annotations each, plus the sparse protocol (uniform total-count
/// subsampling, flat weights) with the x-axis counting only annotations on
/// pairable items. Throws kEmptyResult if no k is feasible.
ConstantKResult constant_k_comparison(const AnnotationTable& table,
                                      std::span<const std::int64_t> k_values,
                                      const TrialConfig& cfg);

/// Log-log interpolation of a curve's variance at `annotation_count`;
/// nullopt outside the curve's range or where a variance is zero.
std::optional<double> interpolate_variance(const VarianceCurve& curve,
                                           double annotation_count);

/// Synthetic fully annotated table. Annotator j draws labels from `dist`
/// tilted by exp(skew * g_jc) with g standard normal. With item_consensus > 0
/// each item also gets a latent label that annotators pick with an
/// item-specific probability drawn from U(0, item_consensus), which makes
/// item agreement heterogeneous.
struct SynthSpec {
  std::int64_t items = 1;
  std::int64_t annotators = 1;
  ClassDistribution dist = ClassDistribution::uniform(2);
  double per_annotator_skew = 0.0;
  double item_consensus = 0.0;
  std::uint64_t seed = 0;
};

AnnotationTable synth_table(const SynthSpec& spec);
AnnotationTable synth_table(std::int64_t items, std::int64_t annotators,
                            const ClassDistribution& dist,
                            std::optional<double> per_annotator_skew,
                            std::uint64_t seed);

/// Fixture with exact per-item class counts: item i<k> gets counts[k][c]
/// annotations of label c<c> from distinct annotators a<j>.
AnnotationTable table_from_counts(
    const std::vector<std::vector<std::int64_t>>& counts);

}  // namespace spa
