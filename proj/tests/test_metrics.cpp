#include <random>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mbsmooth/metrics.hpp"
#include "support/generators.hpp"

using namespace mbsmooth;

namespace {

Instance inst(const std::vector<std::string>& features,
              const std::string& label) {
  Instance out;
  for (const std::string& f : features) out.values.emplace_back(Symbol(f));
  out.label = ClassLabel(label);
  return out;
}

Pattern pattern(const std::vector<std::string>& features) {
  Pattern out;
  for (const std::string& f : features) out.emplace_back(Symbol(f));
  return out;
}

}  // namespace

TEST_CASE("overlap delta is the 0/1 mismatch indicator", "[metrics]") {
  CHECK(overlap_delta(Symbol("with"), Symbol("with")) == 0.0);
  CHECK(overlap_delta(Symbol("with"), Symbol("without")) == 1.0);
  CHECK_THROWS_AS(overlap_delta(Symbol("x"), NumericVector{1.0}),
                  KindMismatchError);
}

TEST_CASE("cosine delta maps similarity onto [0, 1]", "[metrics]") {
  CHECK(cosine_delta({1.0, 0.0}, {2.0, 0.0}) == Catch::Approx(0.0));
  CHECK(cosine_delta({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(0.5));
  CHECK(cosine_delta({1.0, 0.0}, {-3.0, 0.0}) == Catch::Approx(1.0));
  CHECK_THROWS_AS(cosine_delta({1.0}, {1.0, 2.0}), DimensionMismatchError);
}

TEST_CASE("cosine delta zero-vector conventions", "[metrics]") {
  CHECK(cosine_delta({0.0, 0.0}, {0.0, 0.0}) == 0.0);
  CHECK(cosine_delta({0.0, 0.0}, {1.0, 2.0}) == 1.0);
  CHECK(cosine_delta({1.0, 2.0}, {0.0, 0.0}) == 1.0);
}

TEST_CASE("cosine delta stays within bounds on random vectors", "[metrics]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const NumericVector u = testgen::random_vector(rng, 5);
    const NumericVector v = testgen::random_vector(rng, 5);
    const double d = cosine_delta(u, v);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(d == Catch::Approx(cosine_delta(v, u)).margin(1e-15));
  }
}

TEST_CASE("weighted distance sums per-feature mismatch weights",
          "[metrics]") {
  const InstanceBase base({inst({"ate", "pizza", "with", "fork"}, "V"),
                           inst({"ran", "races", "over", "hills"}, "N")});
  const MetricConfig config =
      make_metric_config(base, user_weights({0.03, 0.03, 0.10, 0.03}));

  CHECK(distance(pattern({"ate", "pizza", "with", "fork"}),
                 pattern({"ran", "races", "over", "hills"}),
                 config) == Catch::Approx(0.19));
  CHECK(distance(pattern({"ate", "pizza", "with", "fork"}),
                 pattern({"ate", "pizza", "over", "fork"}),
                 config) == Catch::Approx(0.10));
  CHECK(distance(pattern({"ate", "pizza", "with", "fork"}),
                 pattern({"ate", "pizza", "with", "fork"}),
                 config) == 0.0);
}

TEST_CASE("distance rejects mismatched shapes", "[metrics]") {
  const InstanceBase base({inst({"a", "x"}, "V")});
  const MetricConfig config = make_metric_config(base, uniform_weights(2));
  CHECK_THROWS_AS(
      distance(pattern({"a"}), pattern({"a", "x"}), config),
      MixedArityError);
  CHECK_THROWS_AS(make_metric_config(base, uniform_weights(3)),
                  LengthMismatchError);
}

TEST_CASE("distance is symmetric with zero self-distance on random input",
          "[metrics]") {
  std::mt19937_64 rng(41);
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const std::vector<Instance> instances =
        testgen::random_symbolic_base(rng, testgen::BaseParams{}, trial);
    const InstanceBase base(instances);
    const MetricConfig config = make_metric_config(
        base, compute_weights(base, WeightScheme::InformationGain));
    const Pattern x = testgen::random_query(rng, base);
    const Pattern y = testgen::random_query(rng, base);
    CHECK(distance(std::span<const FeatureValue>(x),
                   std::span<const FeatureValue>(y), config) ==
          Catch::Approx(distance(std::span<const FeatureValue>(y),
                                 std::span<const FeatureValue>(x), config))
              .margin(1e-15));
    CHECK(distance(std::span<const FeatureValue>(x),
                   std::span<const FeatureValue>(x), config) == 0.0);
  }
}

TEST_CASE("uniform weights make distance the mismatch count", "[metrics]") {
  std::mt19937_64 rng(47);
  for (std::size_t trial = 0; trial < 30; ++trial) {
    const std::vector<Instance> instances =
        testgen::random_symbolic_base(rng, testgen::BaseParams{}, trial);
    const InstanceBase base(instances);
    const FeatureWeights w = compute_weights(base, WeightScheme::Uniform);
    const MetricConfig config = make_metric_config(base, w);
    const Pattern x = testgen::random_query(rng, base);
    const Pattern y = testgen::random_query(rng, base);
    std::size_t mismatches = 0;
    double weight_total = 0.0;
    for (std::size_t f = 0; f < base.arity(); ++f) {
      if (!(std::get<Symbol>(x[f]) == std::get<Symbol>(y[f]))) ++mismatches;
      weight_total += w.values[f];
    }
    const double d = distance(std::span<const FeatureValue>(x),
                              std::span<const FeatureValue>(y), config);
    CHECK(d == static_cast<double>(mismatches));
    CHECK(d <= weight_total + 1e-15);
  }
}

TEST_CASE("scaling all weights scales every distance linearly", "[metrics]") {
  std::mt19937_64 rng(43);
  const std::vector<Instance> instances =
      testgen::random_symbolic_base(rng, testgen::BaseParams{}, 1);
  const InstanceBase base(instances);
  const FeatureWeights w =
      compute_weights(base, WeightScheme::InformationGain);
  std::vector<double> scaled = w.values;
  for (double& v : scaled) v *= 3.0;
  const MetricConfig c1 = make_metric_config(base, w);
  const MetricConfig c3 = make_metric_config(base, user_weights(scaled));
  for (int trial = 0; trial < 20; ++trial) {
    const Pattern x = testgen::random_query(rng, base);
    const Pattern y = testgen::random_query(rng, base);
    CHECK(distance(std::span<const FeatureValue>(x),
                   std::span<const FeatureValue>(y), c3) ==
          Catch::Approx(3.0 * distance(std::span<const FeatureValue>(x),
                                       std::span<const FeatureValue>(y), c1))
              .margin(1e-12));
  }
}
