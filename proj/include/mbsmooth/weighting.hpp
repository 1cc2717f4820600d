#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbsmooth/instance.hpp"

namespace mbsmooth {

// Absolute tolerance for treating two weights (or two schema distances
// derived from them) as tied.
inline constexpr double kWeightTieTolerance = 1e-12;

enum class WeightScheme { Uniform, InformationGain, UserSupplied };

// One nonnegative weight per feature. `bins` records the bin count when the
// weights have been discretized.
struct FeatureWeights {
  std::vector<double> values;
  WeightScheme scheme = WeightScheme::Uniform;
  std::optional<std::size_t> bins;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t f) const { return values[f]; }
};

inline FeatureWeights uniform_weights(std::size_t arity) {
  return FeatureWeights{std::vector<double>(arity, 1.0),
                        WeightScheme::Uniform, std::nullopt};
}

// Entropy in bits of a nonnegative mass function; masses need not be
// normalized. Zero masses contribute nothing.
inline double entropy(const std::map<Symbol, double>& dist) {
  double total = 0.0;
  for (const auto& [label, m] : dist) {
    if (m < 0.0) {
      throw NegativeCountError("negative mass for '" +
                               std::string(label.text()) + "'");
    }
    total += m;
  }
  if (total <= 0.0) {
    throw EmptyDistributionError("entropy of an all-zero distribution");
  }
  double h = 0.0;
  for (const auto& [label, m] : dist) {
    if (m <= 0.0) continue;
    const double p = m / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

namespace detail {

inline void check_symbolic_feature(const InstanceBase& base, std::size_t f) {
  if (f >= base.arity()) {
    throw Error("feature index " + std::to_string(f) + " out of range");
  }
  if (base.kind(f) != FeatureKind::Symbolic) {
    throw NumericFeatureError("feature " + std::to_string(f) +
                              " holds numeric vectors");
  }
}

// Per-value occurrence counts and per-value class counts for one feature.
struct ValueStats {
  std::map<Symbol, double> value_counts;
  std::map<Symbol, std::map<Symbol, double>> class_counts;
};

inline ValueStats feature_stats(const InstanceBase& base, std::size_t f) {
  ValueStats stats;
  for (const Instance& inst : base.instances()) {
    Symbol v = std::get<Symbol>(inst.values[f]);
    stats.value_counts[v] += 1.0;
    stats.class_counts[v][inst.label] += 1.0;
  }
  return stats;
}

}  // namespace detail

// Entropy in bits of a feature's own value distribution (Quinlan's split
// info), with probabilities taken as relative frequencies over the base.
inline double split_info(const InstanceBase& base, std::size_t f) {
  detail::check_symbolic_feature(base, f);
  return entropy(detail::feature_stats(base, f).value_counts);
}

// Split-info-normalized information gain of one feature:
//   ( H(C) - sum_v P(v) H(C|v) ) / si(f)
// A constant feature (si = 0) carries no information and yields 0.
inline double information_gain(const InstanceBase& base, std::size_t f) {
  detail::check_symbolic_feature(base, f);

  std::map<Symbol, double> class_counts;
  for (const Instance& inst : base.instances()) {
    class_counts[inst.label] += 1.0;
  }
  const double class_entropy = entropy(class_counts);

  const detail::ValueStats stats = detail::feature_stats(base, f);
  const double n = static_cast<double>(base.size());

  double conditional = 0.0;
  for (const auto& [v, count] : stats.value_counts) {
    conditional += (count / n) * entropy(stats.class_counts.at(v));
  }

  const double si = entropy(stats.value_counts);
  if (si <= 0.0) return 0.0;
  return std::max(class_entropy - conditional, 0.0) / si;
}

inline FeatureWeights user_weights(std::vector<double> values) {
  for (std::size_t f = 0; f < values.size(); ++f) {
    if (!(values[f] >= 0.0) || !std::isfinite(values[f])) {
      throw NegativeWeightError("weight " + std::to_string(values[f]) +
                                " at feature " + std::to_string(f) +
                                " is not a nonnegative finite real");
    }
  }
  return FeatureWeights{std::move(values), WeightScheme::UserSupplied,
                        std::nullopt};
}

// Computes per-feature weights under the given scheme. For information gain
// every feature must be symbolic unless `numeric_overrides` supplies a weight
// for each numeric position.
inline FeatureWeights compute_weights(
    const InstanceBase& base, WeightScheme scheme,
    const std::vector<std::optional<double>>& numeric_overrides = {}) {
  switch (scheme) {
    case WeightScheme::Uniform:
      return uniform_weights(base.arity());
    case WeightScheme::InformationGain: {
      std::vector<double> w(base.arity());
      for (std::size_t f = 0; f < base.arity(); ++f) {
        if (base.kind(f) == FeatureKind::Numeric) {
          if (f < numeric_overrides.size() && numeric_overrides[f]) {
            if (!(*numeric_overrides[f] >= 0.0)) {
              throw NegativeWeightError("override weight for feature " +
                                        std::to_string(f) + " is negative");
            }
            w[f] = *numeric_overrides[f];
            continue;
          }
          throw NumericFeatureError(
              "information gain needs symbolic features; feature " +
              std::to_string(f) + " is numeric and has no override");
        }
        w[f] = information_gain(base, f);
      }
      return FeatureWeights{std::move(w), WeightScheme::InformationGain,
                            std::nullopt};
    }
    case WeightScheme::UserSupplied:
      throw Error("user-supplied weights must come through user_weights()");
  }
  throw Error("unknown weight scheme");
}

// Discretizes weights into `n_bins` equal-width bins over [min, max], each
// weight replaced by its bin's midpoint. Inputs that already hold at most
// n_bins distinct values are their own representatives and pass through
// unchanged, which makes the mapping idempotent.
inline FeatureWeights discretize_weights(const FeatureWeights& weights,
                                         std::size_t n_bins) {
  if (n_bins < 1) {
    throw Error("n_bins must be at least 1");
  }
  FeatureWeights out = weights;
  out.bins = n_bins;
  if (weights.values.empty()) return out;

  std::set<double> distinct(weights.values.begin(), weights.values.end());
  if (distinct.size() <= n_bins) return out;

  const auto [lo_it, hi_it] =
      std::minmax_element(weights.values.begin(), weights.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(n_bins);

  for (double& w : out.values) {
    auto bin = static_cast<std::size_t>((w - lo) / width);
    bin = std::min(bin, n_bins - 1);
    w = lo + (static_cast<double>(bin) + 0.5) * width;
  }
  return out;
}

}  // namespace mbsmooth
