#include <map>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mbsmooth/instance.hpp"

using namespace mbsmooth;

namespace {

Instance inst(const std::vector<std::string>& features,
              const std::string& label) {
  Instance out;
  for (const std::string& f : features) out.values.emplace_back(Symbol(f));
  out.label = ClassLabel(label);
  return out;
}

}  // namespace

TEST_CASE("normalize_counts produces a probability distribution",
          "[instance]") {
  const ClassDistribution dist = normalize_counts(
      {{ClassLabel("V"), 3.0}, {ClassLabel("N"), 1.0}});
  REQUIRE(dist.defined);
  CHECK(dist.at(ClassLabel("V")) == Catch::Approx(0.75));
  CHECK(dist.at(ClassLabel("N")) == Catch::Approx(0.25));
  CHECK(dist.at(ClassLabel("X")) == 0.0);
}

TEST_CASE("normalize_counts rejects negative counts", "[instance]") {
  CHECK_THROWS_AS(normalize_counts({{ClassLabel("V"), -1.0}}),
                  NegativeCountError);
}

TEST_CASE("zero total mass yields an undefined distribution", "[instance]") {
  const ClassDistribution dist = normalize_counts({{ClassLabel("V"), 0.0}});
  CHECK_FALSE(dist.defined);
}

TEST_CASE("argmax breaks ties toward the lexicographically first label",
          "[instance]") {
  const ClassDistribution dist = normalize_counts(
      {{ClassLabel("V"), 1.0}, {ClassLabel("N"), 1.0}});
  CHECK(dist.argmax() == ClassLabel("N"));

  const ClassDistribution skewed = normalize_counts(
      {{ClassLabel("V"), 2.0}, {ClassLabel("N"), 1.0}});
  CHECK(skewed.argmax() == ClassLabel("V"));
}

TEST_CASE("max_abs_diff compares distributions pointwise", "[instance]") {
  const ClassDistribution a = normalize_counts(
      {{ClassLabel("V"), 3.0}, {ClassLabel("N"), 1.0}});
  const ClassDistribution b = normalize_counts(
      {{ClassLabel("V"), 1.0}, {ClassLabel("N"), 1.0}});
  CHECK(a.max_abs_diff(b) == Catch::Approx(0.25));
  CHECK(a.max_abs_diff(a) == 0.0);
}

TEST_CASE("instance base records arity, kinds, and inventories",
          "[instance]") {
  const InstanceBase base({inst({"ate", "pizza", "with", "fork"}, "V"),
                           inst({"ate", "pizza", "with", "anchovies"}, "N")});
  CHECK(base.arity() == 4);
  CHECK(base.size() == 2);
  CHECK(base.all_symbolic());
  CHECK(base.kind(0) == FeatureKind::Symbolic);
  CHECK(base.value_inventory(3) ==
        std::set<Symbol>{Symbol("anchovies"), Symbol("fork")});
  CHECK(base.class_inventory() ==
        std::set<ClassLabel>{ClassLabel("N"), ClassLabel("V")});
}

TEST_CASE("rebuilding a base from the same instances is an identity",
          "[instance]") {
  const std::vector<Instance> instances = {
      inst({"ate", "pizza", "with", "fork"}, "V"),
      inst({"saw", "man", "with", "telescope"}, "N"),
      inst({"ate", "pizza", "with", "anchovies"}, "N")};
  const InstanceBase first(instances);
  const InstanceBase second(instances);
  CHECK(first.arity() == second.arity());
  CHECK(first.size() == second.size());
  CHECK(first.class_inventory() == second.class_inventory());
  for (std::size_t f = 0; f < first.arity(); ++f) {
    CHECK(first.value_inventory(f) == second.value_inventory(f));
  }
  // Every stored value is drawn from its feature's inventory.
  for (std::size_t i = 0; i < first.size(); ++i) {
    const Instance& stored = first.instance(i);
    CHECK(stored.values == instances[i].values);
    CHECK(stored.label == instances[i].label);
    for (std::size_t f = 0; f < first.arity(); ++f) {
      CHECK(first.value_inventory(f).count(std::get<Symbol>(stored.values[f])) ==
            1);
    }
  }
}

TEST_CASE("instance base rejects bad input", "[instance]") {
  CHECK_THROWS_AS(InstanceBase(std::vector<Instance>{}), EmptyBaseError);
  CHECK_THROWS_AS(InstanceBase({inst({"a", "x"}, "V"), inst({"a"}, "N")}),
                  MixedArityError);

  Instance numeric;
  numeric.values.emplace_back(NumericVector{0.1, 0.2});
  numeric.label = ClassLabel("V");
  CHECK_THROWS_AS(InstanceBase({inst({"a"}, "V"), numeric}), MixedKindError);

  Instance short_vec;
  short_vec.values.emplace_back(NumericVector{0.1});
  short_vec.label = ClassLabel("N");
  CHECK_THROWS_AS(InstanceBase({numeric, short_vec}), DimensionMismatchError);
  CHECK(InstanceBase({numeric, numeric}).vector_dimension(0) == 2);
}
