#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mbsmooth/instance.hpp"
#include "mbsmooth/metrics.hpp"
#include "mbsmooth/neighbors.hpp"
#include "mbsmooth/weighting.hpp"

namespace mbsmooth {

// One step of the specific-to-general walk: the schemata summed together as
// terms at this level of the sequence.
struct BackoffStep {
  std::vector<Schema> schemata;
  std::size_t level = 0;    // rank in the ordering
  double distance = 0.0;    // shared schema distance of the step
};

namespace detail {

inline void check_symbolic_backoff(const InstanceBase& base,
                                   std::span<const FeatureValue> query) {
  if (!base.all_symbolic()) {
    throw NumericFeatureError("back-off needs an all-symbolic base");
  }
  if (query.size() != base.arity()) {
    throw MixedArityError("query arity " + std::to_string(query.size()) +
                          " does not match base arity " +
                          std::to_string(base.arity()));
  }
  for (const FeatureValue& v : query) {
    if (!is_symbol(v)) {
      throw NumericFeatureError("back-off needs an all-symbolic query");
    }
  }
}

// Bit f set iff the instance mismatches the query at feature f. An instance
// matches a wildcard mask iff its mismatch bits are all wildcarded.
inline std::vector<std::uint32_t> mismatch_masks(
    const InstanceBase& base, std::span<const FeatureValue> query) {
  std::vector<std::uint32_t> masks;
  masks.reserve(base.size());
  for (const Instance& inst : base.instances()) {
    std::uint32_t m = 0;
    for (std::size_t f = 0; f < query.size(); ++f) {
      if (!(inst.values[f] == query[f])) m |= std::uint32_t{1} << f;
    }
    masks.push_back(m);
  }
  return masks;
}

struct LevelCounts {
  double total = 0.0;                  // sum of f(schema) over the level
  std::map<ClassLabel, double> by_class;  // sum of f(c, schema)
};

// Pooled counts of one wildcard level: every schema with `level` wildcards
// contributes its matching instances (an instance can instantiate several
// schemata of the level and is counted once per schema).
inline LevelCounts level_counts(const InstanceBase& base,
                                const std::vector<std::uint32_t>& mismatch,
                                std::size_t level) {
  const std::size_t arity = base.arity();
  LevelCounts counts;
  const std::uint32_t n_masks = std::uint32_t{1} << arity;
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != level) continue;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if ((mismatch[i] & ~mask) == 0) {
        counts.total += 1.0;
        counts.by_class[base.instance(i).label] += 1.0;
      }
    }
  }
  return counts;
}

}  // namespace detail

struct BackoffResult {
  ClassDistribution distribution;
  std::size_t level_used = 0;
};

// Naive Back-off: walk wildcard levels from most specific to most general
// and return the pooled relative class frequencies of the first level whose
// summed frequency is positive. The all-wildcard level matches every
// instance, so the result is always defined.
inline BackoffResult naive_backoff_estimate(
    const InstanceBase& base, std::span<const FeatureValue> query) {
  detail::check_symbolic_backoff(base, query);
  if (base.arity() > kMaxSchemaArity) {
    throw ArityTooLargeError("back-off enumeration needs arity <= " +
                             std::to_string(kMaxSchemaArity));
  }
  const auto mismatch = detail::mismatch_masks(base, query);
  for (std::size_t level = 0; level <= base.arity(); ++level) {
    detail::LevelCounts counts = detail::level_counts(base, mismatch, level);
    if (counts.total > 0.0) {
      return BackoffResult{normalize_counts(counts.by_class), level};
    }
  }
  throw Error("unreachable: the all-wildcard level matches every instance");
}

struct IgBackoffResult {
  ClassDistribution distribution;
  BackoffStep step;
};

// Weighted back-off: schemata ordered by schema_distance under the given
// weights (ties within 1e-12 merged into one step), walked specific to
// general; returns the first step with a positive summed frequency.
inline IgBackoffResult ig_backoff_estimate(const InstanceBase& base,
                                           std::span<const FeatureValue> query,
                                           const FeatureWeights& weights) {
  detail::check_symbolic_backoff(base, query);
  if (weights.size() != base.arity()) {
    throw LengthMismatchError("weights length does not match base arity");
  }

  std::vector<Schema> schemata = enumerate_schemata(query);
  std::stable_sort(schemata.begin(), schemata.end(),
                   [&](const Schema& a, const Schema& b) {
                     return schema_distance(a, weights) <
                            schema_distance(b, weights);
                   });

  std::size_t level = 0;
  std::size_t begin = 0;
  while (begin < schemata.size()) {
    const double step_distance = schema_distance(schemata[begin], weights);
    std::size_t end = begin + 1;
    while (end < schemata.size() &&
           schema_distance(schemata[end], weights) - step_distance <=
               kWeightTieTolerance) {
      ++end;
    }

    detail::LevelCounts counts;
    for (std::size_t s = begin; s < end; ++s) {
      for (const Instance& inst : base.instances()) {
        if (schemata[s].matches(inst)) {
          counts.total += 1.0;
          counts.by_class[inst.label] += 1.0;
        }
      }
    }
    if (counts.total > 0.0) {
      BackoffStep step;
      step.schemata.assign(schemata.begin() + begin, schemata.begin() + end);
      step.level = level;
      step.distance = step_distance;
      return IgBackoffResult{normalize_counts(counts.by_class),
                             std::move(step)};
    }
    begin = end;
    ++level;
  }
  throw Error("unreachable: the all-wildcard schema matches every instance");
}

// Interpolation weights per wildcard level, lambdas[i] for level i. Must
// hold arity+1 nonnegative entries summing to 1.
struct InterpolationConfig {
  std::vector<double> lambdas;
};

// Fixed-lambda linear interpolation over all wildcard levels. Levels whose
// summed frequency is zero contribute nothing; their lambda mass is
// redistributed proportionally over the defined levels.
inline ClassDistribution interpolation_estimate(
    const InstanceBase& base, std::span<const FeatureValue> query,
    const InterpolationConfig& config) {
  detail::check_symbolic_backoff(base, query);
  if (base.arity() > kMaxSchemaArity) {
    throw ArityTooLargeError("back-off enumeration needs arity <= " +
                             std::to_string(kMaxSchemaArity));
  }
  if (config.lambdas.size() != base.arity() + 1) {
    throw InvalidLambdasError("need " + std::to_string(base.arity() + 1) +
                              " lambdas, got " +
                              std::to_string(config.lambdas.size()));
  }
  double lambda_total = 0.0;
  for (double l : config.lambdas) {
    if (l < 0.0) throw InvalidLambdasError("lambdas must be nonnegative");
    lambda_total += l;
  }
  if (std::abs(lambda_total - 1.0) > 1e-9) {
    throw InvalidLambdasError("lambdas must sum to 1");
  }

  const auto mismatch = detail::mismatch_masks(base, query);
  std::map<ClassLabel, double> mixed;
  double defined_lambda = 0.0;
  for (std::size_t level = 0; level <= base.arity(); ++level) {
    detail::LevelCounts counts = detail::level_counts(base, mismatch, level);
    if (counts.total <= 0.0) continue;
    defined_lambda += config.lambdas[level];
    for (const auto& [label, c] : counts.by_class) {
      mixed[label] += config.lambdas[level] * (c / counts.total);
    }
  }
  // The all-wildcard level is always defined; only a zero lambda mass on
  // the defined levels could leave nothing to renormalize.
  if (defined_lambda <= 0.0) {
    throw InvalidLambdasError(
        "all lambda mass sits on levels with zero frequency");
  }
  return normalize_counts(mixed);
}

// Structured comparison of the two estimation routes on one query: the
// Naive Back-off walk against the k=1 unweighted-overlap majority vote.
struct EquivalenceReport {
  bool pass = false;
  ClassDistribution backoff_distribution;
  ClassDistribution knn_distribution;
  std::size_t backoff_level = 0;
  std::size_t knn_hamming = 0;
  double max_abs_diff = 0.0;
};

inline constexpr double kEquivalenceTolerance = 1e-12;

inline EquivalenceReport equivalence_check(const InstanceBase& base,
                                           std::span<const FeatureValue> query) {
  EquivalenceReport report;

  BackoffResult backoff = naive_backoff_estimate(base, query);
  report.backoff_distribution = backoff.distribution;
  report.backoff_level = backoff.level_used;

  const MetricConfig config =
      make_metric_config(base, uniform_weights(base.arity()));
  const NeighborSet neighbors = retrieve_neighbors(base, query, config, 1);
  report.knn_distribution = majority_vote(neighbors);
  report.knn_hamming = static_cast<std::size_t>(
      std::llround(neighbors.groups.front().distance));

  report.max_abs_diff =
      report.backoff_distribution.max_abs_diff(report.knn_distribution);
  report.pass = report.backoff_level == report.knn_hamming &&
                report.max_abs_diff <= kEquivalenceTolerance;
  return report;
}

}  // namespace mbsmooth
