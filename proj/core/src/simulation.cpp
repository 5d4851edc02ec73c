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

#include "spa/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "spa/error.hpp"
#include "spa/metrics.hpp"

namespace spa {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent seed stream for one gridpoint / k value of an experiment.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

double standard_normal(Rng& rng) {
  // Box-Muller; u1 in (0, 1].
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t categorical(Rng& rng, std::span<const double> probs) {
  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    cumulative += probs[c];
    if (u < cumulative) return c;
  }
  // Rounding left u above the final cumulative sum; take the last class with
  // non-zero mass.
  for (std::size_t c = probs.size(); c-- > 0;) {
    if (probs[c] > 0.0) return c;
  }
  return 0;
}

// Moves `count` uniformly chosen elements of `values` to its front.
template <typename T>
void partial_shuffle(std::vector<T>& values, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + uniform_index(rng, values.size() - i);
    std::swap(values[i], values[j]);
  }
}

void check_trials(const TrialConfig& cfg) {
  if (cfg.trials < 1) {
    throw Error(ErrorCode::kUsage, "trials must be >= 1");
  }
}

// Calls fn(trial) for every trial. Each trial writes only its own slots, so
// results do not depend on how trials are spread over threads.
template <typename Fn>
void run_trials(std::int64_t trials, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    for (std::int64_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t t = w; t < trials; t += workers) fn(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& thread : pool) thread.join();
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

// Sample statistics over the finite entries of `values` (NaN marks a skipped
// trial), reduced in index order.
struct Summary {
  double mean = 0.0;
  double variance = 0.0;
  std::int64_t count = 0;
  std::int64_t skipped = 0;
};

Summary summarize(std::span<const double> values) {
  Summary s;
  double sum = 0.0;
  bool all_equal = true;
  double first = kNaN;
  for (double v : values) {
    if (std::isnan(v)) {
      ++s.skipped;
    } else {
      if (s.count == 0) first = v;
      all_equal = all_equal && v == first;
      sum += v;
      ++s.count;
    }
  }
  if (s.count == 0) return s;
  s.mean = all_equal ? first : sum / static_cast<double>(s.count);
  if (s.count > 1 && !all_equal) {
    double squares = 0.0;
    for (double v : values) {
      if (!std::isnan(v)) squares += (v - s.mean) * (v - s.mean);
    }
    s.variance = squares / static_cast<double>(s.count - 1);
  }
  return s;
}

// Weight by annotation count for each resolved scheme, covering n in
// [0, max_n].
class WeightLookup {
 public:
  WeightLookup(const WeightScheme& resolved, std::int64_t max_n) {
    table_.reserve(static_cast<std::size_t>(max_n) + 1);
    for (std::int64_t n = 0; n <= max_n; ++n) {
      table_.push_back(weight_for_n(resolved, n));
    }
  }

  double operator()(std::int64_t n) const { return table_.at(n); }

 private:
  std::vector<double> table_;
};

// SPA over `items` with weights by n; NaN when nothing is computable.
double spa_or_skip(std::span<const ItemCounts> items,
                   const WeightLookup& lookup) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& item : items) {
    const double k = lookup(item.n());
    if (k == 0.0) continue;
    weighted += k * item_agreement(item);
    total += k;
  }
  return total > 0.0 ? weighted / total : kNaN;
}

std::int64_t max_depth(std::span<const ItemCounts> items) {
  std::int64_t depth = 0;
  for (const auto& item : items) depth = std::max(depth, item.n());
  return depth;
}

std::vector<ItemCounts> counts_from(const AnnotationTable& table,
                                    std::span<const std::size_t> positions) {
  std::vector<ItemCounts> counts(table.num_items(),
                                 ItemCounts::zeros(table.num_classes()));
  const auto indices = table.record_indices();
  for (std::size_t pos : positions) {
    counts[indices[pos].item].increment(indices[pos].label);
  }
  return counts;
}

std::vector<std::vector<std::size_t>> records_by_item(
    const AnnotationTable& table) {
  std::vector<std::vector<std::size_t>> by_item(table.num_items());
  const auto indices = table.record_indices();
  for (std::size_t pos = 0; pos < indices.size(); ++pos) {
    by_item[indices[pos].item].push_back(pos);
  }
  return by_item;
}

std::vector<WeightScheme> resolve_all(std::span<const WeightScheme> schemes,
                                      std::span<const ItemCounts> items) {
  std::vector<WeightScheme> resolved;
  resolved.reserve(schemes.size());
  for (const auto& s : schemes) resolved.push_back(resolve_scheme(s, items));
  return resolved;
}

// Positions of the records removed in one trial.
std::vector<std::size_t> draw_removals(const AnnotationTable& table,
                                       const RemovalPolicy& policy,
                                       std::size_t removals, Rng& rng) {
  std::vector<std::size_t> positions(table.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  if (policy.kind == RemovalPolicy::Kind::kUniformRandom) {
    partial_shuffle(positions, removals, rng);
  } else {
    // Efraimidis-Spirakis: the records with the largest log(u) / w keys form
    // a weighted sample without replacement.
    const auto indices = table.record_indices();
    std::vector<double> keys(positions.size());
    for (std::size_t pos = 0; pos < keys.size(); ++pos) {
      const double u = std::max(uniform_unit(rng),
                                std::numeric_limits<double>::min());
      keys[pos] = std::log(u) / policy.bias[indices[pos].item];
    }
    std::nth_element(positions.begin(), positions.begin() + removals,
                     positions.end(), [&](std::size_t a, std::size_t b) {
                       return keys[a] > keys[b] || (keys[a] == keys[b] && a < b);
                     });
  }
  positions.resize(removals);
  return positions;
}

void validate_policy(const RemovalPolicy& policy, const AnnotationTable& table) {
  if (policy.kind != RemovalPolicy::Kind::kItemBiased) return;
  if (policy.bias.size() != table.num_items()) {
    throw Error(ErrorCode::kUsage,
                "item_biased removal needs one multiplier per item");
  }
  for (double b : policy.bias) {
    if (!std::isfinite(b) || b <= 0.0) {
      throw Error(ErrorCode::kUsage, "bias multipliers must be positive");
    }
  }
}

CurvePoint make_point(std::int64_t annotation_count,
                      std::span<const double> values) {
  const Summary s = summarize(values);
  return {annotation_count, s.variance, s.mean, s.count, s.skipped};
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~trial));
}

Rng make_trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  return Rng(trial_seed(master_seed, trial));
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index bound is 0");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RemovalPolicy RemovalPolicy::uniform_random() { return {}; }

RemovalPolicy RemovalPolicy::item_biased(std::vector<double> bias) {
  return {Kind::kItemBiased, std::move(bias)};
}

std::string_view RemovalPolicy::name() const noexcept {
  return kind == Kind::kUniformRandom ? "uniform_random" : "item_biased";
}

std::vector<double> agreement_targeted_bias(const AnnotationTable& table,
                                            double strength) {
  std::vector<double> bias;
  for (const auto& item : table.item_counts()) {
    bias.push_back(item.pairable() ? 1.0 + strength * item_agreement(item)
                                   : 1.0);
  }
  return bias;
}

SubsampleTarget SubsampleTarget::per_item(std::int64_t k,
                                          std::optional<std::int64_t> max_items) {
  return {Kind::kPerItem, k, max_items};
}

SubsampleTarget SubsampleTarget::total(std::int64_t count) {
  return {Kind::kTotal, count, std::nullopt};
}

AnnotationTable remove_one(const AnnotationTable& table, Rng& rng) {
  if (table.empty()) {
    throw Error(ErrorCode::kNothingToRemove, "table has no annotations");
  }
  const auto dropped = uniform_index(rng, table.size());
  std::vector<std::size_t> keep;
  keep.reserve(table.size() - 1);
  for (std::size_t pos = 0; pos < table.size(); ++pos) {
    if (pos != dropped) keep.push_back(pos);
  }
  return table.subset(keep);
}

AnnotationTable subsample_to(const AnnotationTable& table,
                             const SubsampleTarget& target, Rng& rng) {
  std::vector<std::size_t> keep;
  if (target.kind == SubsampleTarget::Kind::kTotal) {
    if (target.value < 0 ||
        static_cast<std::size_t>(target.value) > table.size()) {
      throw Error(ErrorCode::kEmptyResult,
                  "cannot keep " + std::to_string(target.value) + " of " +
                      std::to_string(table.size()) + " records");
    }
    if (static_cast<std::size_t>(target.value) == table.size()) return table;
    keep.resize(table.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    partial_shuffle(keep, static_cast<std::size_t>(target.value), rng);
    keep.resize(static_cast<std::size_t>(target.value));
  } else {
    if (target.value < 1) {
      throw Error(ErrorCode::kUsage, "annotations per item must be >= 1");
    }
    const auto k = static_cast<std::size_t>(target.value);
    auto by_item = records_by_item(table);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < by_item.size(); ++i) {
      if (by_item[i].size() >= k) eligible.push_back(i);
    }
    if (eligible.empty()) {
      throw Error(ErrorCode::kEmptyResult,
                  "no item has " + std::to_string(k) + " annotations");
    }
    std::size_t kept_items = eligible.size();
    if (target.max_items) {
      kept_items = std::min<std::size_t>(
          kept_items, static_cast<std::size_t>(std::max<std::int64_t>(
                          0, *target.max_items)));
      partial_shuffle(eligible, kept_items, rng);
      eligible.resize(kept_items);
    }
    for (std::size_t item : eligible) {
      auto& records = by_item[item];
      partial_shuffle(records, k, rng);
      keep.insert(keep.end(), records.begin(), records.begin() + k);
    }
  }
  std::sort(keep.begin(), keep.end());
  return table.subset(keep);
}

bool UnbiasednessResult::within(double sigmas) const noexcept {
  return std::abs(mean - reference) <= sigmas * std_error;
}

std::vector<UnbiasednessResult> unbiasedness_experiments(
    const AnnotationTable& table, std::int64_t removals,
    const TrialConfig& cfg) {
  check_trials(cfg);
  validate_policy(cfg.removal, table);
  if (cfg.schemes.empty()) {
    throw Error(ErrorCode::kUsage, "no weighting scheme requested");
  }
  if (removals < 0 || static_cast<std::size_t>(removals) > table.size()) {
    throw Error(ErrorCode::kEmptyResult,
                "cannot remove " + std::to_string(removals) + " of " +
                    std::to_string(table.size()) + " records");
  }

  const std::vector<ItemCounts> full = table.item_counts();
  const auto resolved = resolve_all(cfg.schemes, full);
  std::vector<WeightLookup> lookups;
  for (const auto& s : resolved) lookups.emplace_back(s, max_depth(full));

  std::vector<UnbiasednessResult> results;
  for (std::size_t s = 0; s < resolved.size(); ++s) {
    UnbiasednessResult r;
    r.scheme = std::string(resolved[s].name());
    r.reference = spa(full, compute_weights(resolved[s], full).span());
    r.bias_inducing = cfg.removal.bias_inducing();
    results.push_back(std::move(r));
  }

  // values[s * trials + t]
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<double> values(resolved.size() * trials, kNaN);
  const auto indices = table.record_indices();
  run_trials(cfg.trials, cfg.threads, [&](std::int64_t t) {
    Rng rng = make_trial_rng(cfg.seed, static_cast<std::uint64_t>(t));
    std::vector<ItemCounts> counts = full;
    for (std::size_t pos : draw_removals(table, cfg.removal,
                                         static_cast<std::size_t>(removals),
                                         rng)) {
      counts[indices[pos].item].decrement(indices[pos].label);
    }
    for (std::size_t s = 0; s < lookups.size(); ++s) {
      values[s * trials + static_cast<std::size_t>(t)] =
          spa_or_skip(counts, lookups[s]);
    }
  });

  for (std::size_t s = 0; s < results.size(); ++s) {
    const Summary summary = summarize(
        std::span<const double>(values).subspan(s * trials, trials));
    if (summary.count == 0) {
      throw Error(ErrorCode::kDegenerateExperiment,
                  "every trial left no computable item");
    }
    results[s].mean = summary.mean;
    results[s].std_error =
        std::sqrt(summary.variance / static_cast<double>(summary.count));
    results[s].trials_run = summary.count;
    results[s].trials_skipped = summary.skipped;
  }
  return results;
}

UnbiasednessResult unbiasedness_experiment(const AnnotationTable& table,
                                           std::int64_t removals,
                                           const WeightScheme& scheme,
                                           const TrialConfig& cfg) {
  TrialConfig single = cfg;
  single.schemes = {scheme};
  return unbiasedness_experiments(table, removals, single).front();
}

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi,
                                   std::int64_t points) {
  if (lo < 1 || hi < lo || points < 1) {
    throw Error(ErrorCode::kUsage, "log grid needs 1 <= lo <= hi, points >= 1");
  }
  if (lo == hi || points == 1) return {hi};
  std::vector<std::int64_t> grid;
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (std::int64_t i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    auto value = static_cast<std::int64_t>(
        std::llround(std::exp(log_lo + frac * (log_hi - log_lo))));
    value = std::clamp(value, lo, hi);
    if (grid.empty() || value > grid.back()) grid.push_back(value);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<VarianceCurve> variance_curves(const AnnotationTable& table,
                                           const TrialConfig& cfg) {
  check_trials(cfg);
  if (cfg.schemes.empty()) {
    throw Error(ErrorCode::kUsage, "no weighting scheme requested");
  }
  if (table.size() < 2) {
    throw Error(ErrorCode::kEmptyResult, "table too small for subsampling");
  }
  const std::vector<ItemCounts> full = table.item_counts();
  const auto resolved = resolve_all(cfg.schemes, full);
  std::vector<WeightLookup> lookups;
  for (const auto& s : resolved) lookups.emplace_back(s, max_depth(full));
  const WeightLookup flat(WeightScheme::simple(SchemeKind::kFlat),
                          max_depth(full));

  const auto total = static_cast<std::int64_t>(table.size());
  const std::int64_t lo =
      std::clamp<std::int64_t>(2 * static_cast<std::int64_t>(table.num_items()),
                               2, total);
  const auto grid = log_grid(lo, total, cfg.gridpoints);

  std::vector<VarianceCurve> curves(resolved.size());
  for (std::size_t s = 0; s < resolved.size(); ++s) {
    curves[s].scheme = std::string(resolved[s].name());
    curves[s].baseline_delta.emplace();
  }

  const auto trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t columns = resolved.size() + 1;  // last column is flat
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::uint64_t seed = stream_seed(cfg.seed, g);
    std::vector<double> values(columns * trials, kNaN);
    run_trials(cfg.trials, cfg.threads, [&](std::int64_t t) {
      Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(t));
      std::vector<std::size_t> keep(table.size());
      std::iota(keep.begin(), keep.end(), std::size_t{0});
      const auto budget = static_cast<std::size_t>(grid[g]);
      partial_shuffle(keep, budget, rng);
      keep.resize(budget);
      const auto counts = counts_from(table, keep);
      for (std::size_t s = 0; s < lookups.size(); ++s) {
        values[s * trials + static_cast<std::size_t>(t)] =
            spa_or_skip(counts, lookups[s]);
      }
      values[resolved.size() * trials + static_cast<std::size_t>(t)] =
          spa_or_skip(counts, flat);
    });

    const std::span<const double> all(values);
    const Summary baseline =
        summarize(all.subspan(resolved.size() * trials, trials));
    for (std::size_t s = 0; s < resolved.size(); ++s) {
      const CurvePoint point = make_point(grid[g], all.subspan(s * trials, trials));
      if (point.trials_run == 0) continue;
      curves[s].points.push_back(point);
      curves[s].baseline_delta->push_back(
          {grid[g], point.variance - baseline.variance});
    }
  }
  for (auto& curve : curves) {
    double sum = 0.0;
    for (const auto& d : *curve.baseline_delta) sum += d.variance_minus_flat;
    curve.sum_under_curve = sum;
  }
  return curves;
}

ConstantKResult constant_k_comparison(const AnnotationTable& table,
                                      std::span<const std::int64_t> k_values,
                                      const TrialConfig& cfg) {
  check_trials(cfg);
  const std::vector<ItemCounts> full = table.item_counts();
  const auto by_item = records_by_item(table);
  const WeightLookup flat(WeightScheme::simple(SchemeKind::kFlat),
                          max_depth(full));
  const auto trials = static_cast<std::size_t>(cfg.trials);

  ConstantKResult result;
  std::uint64_t stream = 0;
  for (std::int64_t k : k_values) {
    ++stream;
    if (k < 2) {
      result.warnings.push_back("k=" + std::to_string(k) +
                                " skipped: need at least 2 annotations per item");
      continue;
    }
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (full[i].n() >= k) eligible.push_back(i);
    }
    if (eligible.size() < 2) {
      result.warnings.push_back(
          "k=" + std::to_string(k) + " skipped: only " +
          std::to_string(eligible.size()) + " item(s) have " +
          std::to_string(k) + " annotations");
      continue;
    }

    VarianceCurve curve;
    curve.scheme = "k=" + std::to_string(k);
    const auto grid = log_grid(2, static_cast<std::int64_t>(eligible.size()),
                               cfg.gridpoints);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const std::uint64_t seed = stream_seed(stream_seed(cfg.seed, stream), g);
      const auto items_kept = static_cast<std::size_t>(grid[g]);
      std::vector<double> values(trials, kNaN);
      run_trials(cfg.trials, cfg.threads, [&](std::int64_t t) {
        Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> chosen = eligible;
        partial_shuffle(chosen, items_kept, rng);
        std::sort(chosen.begin(),
                  chosen.begin() + static_cast<std::ptrdiff_t>(items_kept));
        std::vector<ItemCounts> counts;
        counts.reserve(items_kept);
        for (std::size_t c = 0; c < items_kept; ++c) {
          std::vector<std::size_t> records = by_item[chosen[c]];
          partial_shuffle(records, static_cast<std::size_t>(k), rng);
          records.resize(static_cast<std::size_t>(k));
          ItemCounts item = ItemCounts::zeros(table.num_classes());
          for (std::size_t pos : records) {
            item.increment(table.record_indices()[pos].label);
          }
          counts.push_back(std::move(item));
        }
        values[static_cast<std::size_t>(t)] = spa_or_skip(counts, flat);
      });
      curve.points.push_back(make_point(grid[g] * k, values));
    }
    result.curves.push_back(std::move(curve));
  }
  if (result.curves.empty()) {
    throw Error(ErrorCode::kEmptyResult, "no requested k is feasible");
  }

  // Sparse protocol: uniform total-count subsampling with flat weights; the
  // x-axis is the mean number of annotations on pairable items. Budgets start
  // at one annotation per item on average.
  VarianceCurve sparse;
  sparse.scheme = "sparse_flat";
  const auto total = static_cast<std::int64_t>(table.size());
  const std::int64_t lo = std::min(
      std::max<std::int64_t>(static_cast<std::int64_t>(table.num_items()), 2),
      total);
  const auto grid = log_grid(lo, total, cfg.gridpoints);
  const std::uint64_t sparse_seed = stream_seed(cfg.seed, 0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::uint64_t seed = stream_seed(sparse_seed, g);
    std::vector<double> values(trials, kNaN);
    std::vector<double> pairable(trials, 0.0);
    run_trials(cfg.trials, cfg.threads, [&](std::int64_t t) {
      Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(t));
      std::vector<std::size_t> keep(table.size());
      std::iota(keep.begin(), keep.end(), std::size_t{0});
      const auto budget = static_cast<std::size_t>(grid[g]);
      partial_shuffle(keep, budget, rng);
      keep.resize(budget);
      const auto counts = counts_from(table, keep);
      std::int64_t used = 0;
      for (const auto& item : counts) {
        if (item.pairable()) used += item.n();
      }
      pairable[static_cast<std::size_t>(t)] = static_cast<double>(used);
      values[static_cast<std::size_t>(t)] = spa_or_skip(counts, flat);
    });
    CurvePoint point = make_point(0, values);
    if (point.trials_run == 0) continue;
    point.annotation_count = std::llround(summarize(pairable).mean);
    sparse.points.push_back(point);
  }
  std::stable_sort(sparse.points.begin(), sparse.points.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.annotation_count < b.annotation_count;
                   });
  result.curves.push_back(std::move(sparse));
  return result;
}

std::optional<double> interpolate_variance(const VarianceCurve& curve,
                                           double annotation_count) {
  const auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto x0 = static_cast<double>(pts[i].annotation_count);
    if (x0 == annotation_count) return pts[i].variance;
    if (i + 1 == pts.size()) break;
    const auto x1 = static_cast<double>(pts[i + 1].annotation_count);
    if (annotation_count > x0 && annotation_count < x1) {
      const double v0 = pts[i].variance;
      const double v1 = pts[i + 1].variance;
      if (v0 <= 0.0 || v1 <= 0.0) return std::nullopt;
      const double frac = (std::log(annotation_count) - std::log(x0)) /
                          (std::log(x1) - std::log(x0));
      return std::exp(std::log(v0) + frac * (std::log(v1) - std::log(v0)));
    }
  }
  return std::nullopt;
}

AnnotationTable synth_table(const SynthSpec& spec) {
  if (spec.items < 1 || spec.annotators < 1) {
    throw Error(ErrorCode::kUsage,
                "synthetic tables need at least one item and annotator");
  }
  if (spec.item_consensus < 0.0 || spec.item_consensus > 1.0) {
    throw Error(ErrorCode::kUsage, "item consensus must lie in [0, 1]");
  }
  Rng rng = make_trial_rng(spec.seed, 0);
  const auto base = spec.dist.probs();
  const std::size_t num_classes = base.size();

  std::vector<std::vector<double>> annotator_dists(
      static_cast<std::size_t>(spec.annotators));
  for (auto& dist : annotator_dists) {
    dist.assign(base.begin(), base.end());
    if (spec.per_annotator_skew != 0.0) {
      double sum = 0.0;
      for (double& p : dist) {
        p *= std::exp(spec.per_annotator_skew * standard_normal(rng));
        sum += p;
      }
      for (double& p : dist) p /= sum;
    }
  }

  std::vector<std::string> labels;
  for (std::size_t c = 0; c < num_classes; ++c) {
    labels.push_back("c" + std::to_string(c));
  }
  std::vector<AnnotationRecord> records;
  records.reserve(static_cast<std::size_t>(spec.items * spec.annotators));
  for (std::int64_t i = 0; i < spec.items; ++i) {
    const std::size_t latent = categorical(rng, base);
    const double consensus = spec.item_consensus * uniform_unit(rng);
    for (std::int64_t j = 0; j < spec.annotators; ++j) {
      std::size_t label;
      if (consensus > 0.0 && uniform_unit(rng) < consensus) {
        label = latent;
      } else {
        label = categorical(rng, annotator_dists[static_cast<std::size_t>(j)]);
      }
      records.push_back({"i" + std::to_string(i), "a" + std::to_string(j),
                         labels[label]});
    }
  }
  return AnnotationTable::from_records(std::move(records), labels);
}

AnnotationTable synth_table(std::int64_t items, std::int64_t annotators,
                            const ClassDistribution& dist,
                            std::optional<double> per_annotator_skew,
                            std::uint64_t seed) {
  SynthSpec spec;
  spec.items = items;
  spec.annotators = annotators;
  spec.dist = dist;
  spec.per_annotator_skew = per_annotator_skew.value_or(0.0);
  spec.seed = seed;
  return synth_table(spec);
}

AnnotationTable table_from_counts(
    const std::vector<std::vector<std::int64_t>>& counts) {
  std::size_t num_classes = 0;
  for (const auto& row : counts) num_classes = std::max(num_classes, row.size());
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < num_classes; ++c) {
    labels.push_back("c" + std::to_string(c));
  }
  std::vector<AnnotationRecord> records;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t annotator = 0;
    for (std::size_t c = 0; c < counts[i].size(); ++c) {
      if (counts[i][c] < 0) {
        throw Error(ErrorCode::kFormat, "class counts must be non-negative");
      }
      for (std::int64_t r = 0; r < counts[i][c]; ++r) {
        records.push_back({"i" + std::to_string(i),
                           "a" + std::to_string(annotator++), labels[c]});
      }
    }
  }
  return AnnotationTable::from_records(std::move(records), labels);
}

}  // namespace spa
