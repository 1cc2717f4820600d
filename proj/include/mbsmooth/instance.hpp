#pragma once

#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mbsmooth/errors.hpp"
#include "mbsmooth/symbol.hpp"

namespace mbsmooth {

// Feature values are either interned symbols or fixed-dimension real vectors.
// A given feature position holds exactly one kind across an instance base.
using NumericVector = std::vector<double>;
using FeatureValue = std::variant<Symbol, NumericVector>;
using ClassLabel = Symbol;
using Pattern = std::vector<FeatureValue>;

enum class FeatureKind { Symbolic, Numeric };

inline bool is_symbol(const FeatureValue& v) {
  return std::holds_alternative<Symbol>(v);
}

// One memory trace: a fixed-arity vector of feature values plus its label.
struct Instance {
  Pattern values;
  ClassLabel label;
};

// A conditional distribution over class labels. `defined == false` marks the
// all-counts-zero case; a defined distribution sums to 1.
struct ClassDistribution {
  std::map<ClassLabel, double> mass;
  bool defined = false;

  // Argmax label, ties broken by lexicographically smallest label.
  ClassLabel argmax() const {
    if (!defined || mass.empty()) {
      throw EmptyDistributionError("argmax of an undefined distribution");
    }
    auto best = mass.begin();
    for (auto it = std::next(mass.begin()); it != mass.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return best->first;
  }

  double at(ClassLabel c) const {
    auto it = mass.find(c);
    return it == mass.end() ? 0.0 : it->second;
  }

  // Largest per-label absolute difference, over the union of supports.
  // Undefined-vs-defined compares as infinite.
  double max_abs_diff(const ClassDistribution& other) const {
    if (defined != other.defined) {
      return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (const auto& [label, m] : mass) {
      worst = std::max(worst, std::abs(m - other.at(label)));
    }
    for (const auto& [label, m] : other.mass) {
      worst = std::max(worst, std::abs(m - at(label)));
    }
    return worst;
  }
};

// Normalizes nonnegative (possibly real-valued) class counts into a
// distribution. A zero total yields the explicit undefined marker.
inline ClassDistribution normalize_counts(
    const std::map<ClassLabel, double>& counts) {
  double total = 0.0;
  for (const auto& [label, count] : counts) {
    if (count < 0.0) {
      throw NegativeCountError("negative count for class '" +
                               std::string(label.text()) + "'");
    }
    total += count;
  }
  ClassDistribution dist;
  if (total <= 0.0) return dist;
  dist.defined = true;
  for (const auto& [label, count] : counts) {
    dist.mass.emplace(label, count / total);
  }
  return dist;
}

// Immutable training memory: the stored instances plus per-feature value
// inventories and the class inventory. Safe to share across readers.
class InstanceBase {
 public:
  explicit InstanceBase(std::vector<Instance> instances)
      : instances_(std::move(instances)) {
    if (instances_.empty()) {
      throw EmptyBaseError("an instance base needs at least one instance");
    }
    arity_ = instances_[0].values.size();
    kinds_.assign(arity_, FeatureKind::Symbolic);
    dimensions_.assign(arity_, 0);
    inventories_.resize(arity_);

    for (std::size_t n = 0; n < instances_.size(); ++n) {
      const Instance& inst = instances_[n];
      if (inst.values.size() != arity_) {
        throw MixedArityError("instance " + std::to_string(n) + " has arity " +
                              std::to_string(inst.values.size()) +
                              ", expected " + std::to_string(arity_));
      }
      classes_.insert(inst.label);
      for (std::size_t f = 0; f < arity_; ++f) {
        const FeatureValue& v = inst.values[f];
        if (n == 0) {
          kinds_[f] = is_symbol(v) ? FeatureKind::Symbolic
                                   : FeatureKind::Numeric;
          if (!is_symbol(v)) {
            dimensions_[f] = std::get<NumericVector>(v).size();
          }
        } else if (is_symbol(v) != (kinds_[f] == FeatureKind::Symbolic)) {
          throw MixedKindError("feature " + std::to_string(f) +
                               " mixes symbols and numeric vectors");
        }
        if (is_symbol(v)) {
          inventories_[f].insert(std::get<Symbol>(v));
        } else if (std::get<NumericVector>(v).size() != dimensions_[f]) {
          throw DimensionMismatchError(
              "feature " + std::to_string(f) + " has vectors of dimension " +
              std::to_string(std::get<NumericVector>(v).size()) + " and " +
              std::to_string(dimensions_[f]));
        }
      }
    }
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return instances_.size(); }
  const std::vector<Instance>& instances() const noexcept {
    return instances_;
  }
  const Instance& instance(std::size_t i) const { return instances_[i]; }

  FeatureKind kind(std::size_t f) const { return kinds_[f]; }
  std::size_t vector_dimension(std::size_t f) const { return dimensions_[f]; }
  const std::set<Symbol>& value_inventory(std::size_t f) const {
    return inventories_[f];
  }
  const std::set<ClassLabel>& class_inventory() const noexcept {
    return classes_;
  }

  bool all_symbolic() const {
    for (FeatureKind k : kinds_) {
      if (k != FeatureKind::Symbolic) return false;
    }
    return true;
  }

 private:
  std::vector<Instance> instances_;
  std::size_t arity_ = 0;
  std::vector<FeatureKind> kinds_;
  std::vector<std::size_t> dimensions_;
  std::vector<std::set<Symbol>> inventories_;
  std::set<ClassLabel> classes_;
};

inline InstanceBase build_instance_base(std::vector<Instance> instances) {
  return InstanceBase(std::move(instances));
}

}  // namespace mbsmooth
