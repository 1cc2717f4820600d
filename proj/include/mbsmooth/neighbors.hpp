#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mbsmooth/instance.hpp"
#include "mbsmooth/metrics.hpp"
#include "mbsmooth/weighting.hpp"

namespace mbsmooth {

// Schema enumeration is capped: 2^F terms.
inline constexpr std::size_t kMaxSchemaArity = 30;

// A query pattern with a wildcard mask. A training instance matches the
// schema iff it equals the pattern on every non-wildcard position.
struct Schema {
  Pattern pattern;
  std::vector<bool> mask;  // true = wildcard

  std::size_t wildcard_count() const {
    return static_cast<std::size_t>(
        std::count(mask.begin(), mask.end(), true));
  }

  bool matches(const Instance& inst) const {
    for (std::size_t f = 0; f < mask.size(); ++f) {
      if (!mask[f] && !(inst.values[f] == pattern[f])) return false;
    }
    return true;
  }
};

// All 2^F schemata of a query, ordered by wildcard count and then by the
// mask read as a binary number (bit f = position f).
inline std::vector<Schema> enumerate_schemata(
    std::span<const FeatureValue> query) {
  const std::size_t arity = query.size();
  if (arity > kMaxSchemaArity) {
    throw ArityTooLargeError("schema enumeration needs arity <= " +
                             std::to_string(kMaxSchemaArity) + ", got " +
                             std::to_string(arity));
  }
  const std::uint32_t n_masks = std::uint32_t{1} << arity;
  std::vector<std::uint32_t> masks(n_masks);
  for (std::uint32_t m = 0; m < n_masks; ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     return std::popcount(a) < std::popcount(b);
                   });

  std::vector<Schema> schemata;
  schemata.reserve(n_masks);
  for (std::uint32_t m : masks) {
    Schema s;
    s.pattern.assign(query.begin(), query.end());
    s.mask.resize(arity);
    for (std::size_t f = 0; f < arity; ++f) {
      s.mask[f] = ((m >> f) & 1u) != 0;
    }
    schemata.push_back(std::move(s));
  }
  return schemata;
}

// Distance from the most specific schema: the sum of the weights at the
// wildcard positions (the ordering key between schemata).
inline double schema_distance(const Schema& schema,
                              const FeatureWeights& weights) {
  if (schema.mask.size() != weights.size()) {
    throw LengthMismatchError("schema mask length does not match weights");
  }
  double d = 0.0;
  for (std::size_t f = 0; f < schema.mask.size(); ++f) {
    if (schema.mask[f]) d += weights[f];
  }
  return d;
}

// One bucket: all retrieved instances at (tolerance-)equal distance, in base
// order. Members point into the base's instance storage.
struct NeighborGroup {
  double distance = 0.0;
  std::vector<const Instance*> members;
};

struct NeighborSet {
  std::vector<NeighborGroup> groups;  // strictly increasing distance
  std::size_t k_used = 0;
};

// Retrieves the k nearest distance-groups by flat scan. k counts distinct
// distance values, not instances, so equidistant instances are never split
// across the included/excluded boundary. Distances within 1e-12 of a group's
// representative merge into that group.
inline NeighborSet retrieve_neighbors(const InstanceBase& base,
                                      std::span<const FeatureValue> query,
                                      const MetricConfig& config,
                                      std::size_t k) {
  if (k < 1) throw Error("k must be at least 1");

  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(base.size());
  for (std::uint32_t i = 0; i < base.size(); ++i) {
    scored.emplace_back(
        distance(std::span<const FeatureValue>(base.instance(i).values),
                 query, config),
        i);
  }
  std::sort(scored.begin(), scored.end());

  NeighborSet result;
  for (const auto& [d, idx] : scored) {
    if (result.groups.empty() ||
        d - result.groups.back().distance > kWeightTieTolerance) {
      if (result.groups.size() == k) break;
      result.groups.push_back(NeighborGroup{d, {}});
    }
    result.groups.back().members.push_back(&base.instance(idx));
  }
  // A tolerance-merged group can interleave two float values; restore base
  // order (instances are contiguous, so address order is base order).
  for (NeighborGroup& group : result.groups) {
    std::sort(group.members.begin(), group.members.end());
  }
  result.k_used = result.groups.size();
  return result;
}

// Majority vote: each retrieved instance counts once.
inline ClassDistribution majority_vote(const NeighborSet& neighbors) {
  std::map<ClassLabel, double> counts;
  for (const NeighborGroup& group : neighbors.groups) {
    for (const Instance* inst : group.members) {
      counts[inst->label] += 1.0;
    }
  }
  return normalize_counts(counts);
}

// Dudani's distance-weighted vote: the nearest group weighs 1.0, the
// furthest included group 0.0, the rest scale linearly. A single group
// degenerates to all-ones, i.e. the majority vote.
inline ClassDistribution dudani_vote(const NeighborSet& neighbors) {
  if (neighbors.groups.empty()) {
    throw EmptyDistributionError("dudani_vote on an empty neighbor set");
  }
  const double nearest = neighbors.groups.front().distance;
  const double furthest = neighbors.groups.back().distance;
  if (furthest - nearest <= kWeightTieTolerance) {
    return majority_vote(neighbors);
  }
  std::map<ClassLabel, double> counts;
  double total = 0.0;
  for (const NeighborGroup& group : neighbors.groups) {
    const double w = (furthest - group.distance) / (furthest - nearest);
    for (const Instance* inst : group.members) {
      counts[inst->label] += w;
      total += w;
    }
  }
  // All included members at weight 0 cannot happen with a nonempty nearest
  // group; the fallback keeps the vote defined regardless.
  if (total <= 0.0) return majority_vote(neighbors);
  return normalize_counts(counts);
}

enum class Voting { Majority, Dudani };

struct Classification {
  ClassLabel label;
  ClassDistribution distribution;
};

// Full k-NN decision: retrieval, voting, and argmax with lexicographic
// tie-breaking.
inline Classification classify(const InstanceBase& base,
                               std::span<const FeatureValue> query,
                               const MetricConfig& config, std::size_t k,
                               Voting voting) {
  const NeighborSet neighbors = retrieve_neighbors(base, query, config, k);
  ClassDistribution dist = voting == Voting::Majority
                               ? majority_vote(neighbors)
                               : dudani_vote(neighbors);
  ClassLabel label = dist.argmax();
  return Classification{label, std::move(dist)};
}

}  // namespace mbsmooth
