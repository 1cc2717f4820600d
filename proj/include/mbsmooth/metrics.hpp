#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mbsmooth/instance.hpp"
#include "mbsmooth/weighting.hpp"

namespace mbsmooth {

enum class MetricKind { Overlap, Cosine };

// Per-feature metric choices and the weights they are summed under.
// Overlap applies to symbolic positions, cosine to vector positions.
struct MetricConfig {
  std::vector<MetricKind> per_feature;
  FeatureWeights weights;

  std::size_t arity() const noexcept { return per_feature.size(); }
};

// Config for a base: metric per feature follows the feature's kind.
inline MetricConfig make_metric_config(const InstanceBase& base,
                                       FeatureWeights weights) {
  if (weights.size() != base.arity()) {
    throw LengthMismatchError("got " + std::to_string(weights.size()) +
                              " weights for arity " +
                              std::to_string(base.arity()));
  }
  MetricConfig config;
  config.per_feature.reserve(base.arity());
  for (std::size_t f = 0; f < base.arity(); ++f) {
    config.per_feature.push_back(base.kind(f) == FeatureKind::Symbolic
                                     ? MetricKind::Overlap
                                     : MetricKind::Cosine);
  }
  config.weights = std::move(weights);
  return config;
}

// Exact-match distance on symbols: 0 on equality, 1 otherwise.
inline double overlap_delta(const FeatureValue& x, const FeatureValue& y) {
  if (!is_symbol(x) || !is_symbol(y)) {
    throw KindMismatchError("overlap_delta needs symbolic values");
  }
  return std::get<Symbol>(x) == std::get<Symbol>(y) ? 0.0 : 1.0;
}

// Cosine dissimilarity mapped to [0, 1]: (1 - cos(u, v)) / 2, so it composes
// with overlap's {0, 1} scale in the weighted sum. A pair of zero vectors
// counts as identical unknowns (0); exactly one zero vector is a full
// mismatch (1).
inline double cosine_delta(const NumericVector& u, const NumericVector& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatchError("cosine_delta got dimensions " +
                                 std::to_string(u.size()) + " and " +
                                 std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 && nv == 0.0) return 0.0;
  if (nu == 0.0 || nv == 0.0) return 1.0;
  const double cosine = dot / (std::sqrt(nu) * std::sqrt(nv));
  const double delta = (1.0 - cosine) / 2.0;
  return std::clamp(delta, 0.0, 1.0);
}

// Weighted aggregate distance: sum over features of w_i * delta(x_i, y_i).
inline double distance(std::span<const FeatureValue> x,
                       std::span<const FeatureValue> y,
                       const MetricConfig& config) {
  if (x.size() != config.arity() || y.size() != config.arity() ||
      config.weights.size() != config.arity()) {
    throw MixedArityError("pattern arity does not match metric config");
  }
  double total = 0.0;
  for (std::size_t f = 0; f < config.arity(); ++f) {
    double delta;
    if (config.per_feature[f] == MetricKind::Overlap) {
      delta = overlap_delta(x[f], y[f]);
    } else {
      if (is_symbol(x[f]) || is_symbol(y[f])) {
        throw KindMismatchError("cosine metric on a symbolic value at feature " +
                                std::to_string(f));
      }
      delta = cosine_delta(std::get<NumericVector>(x[f]),
                           std::get<NumericVector>(y[f]));
    }
    total += config.weights[f] * delta;
  }
  return total;
}

inline double distance(const Instance& x, const Instance& y,
                       const MetricConfig& config) {
  return distance(std::span<const FeatureValue>(x.values),
                  std::span<const FeatureValue>(y.values), config);
}

}  // namespace mbsmooth
