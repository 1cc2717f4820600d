#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "mbsmooth/instance.hpp"
#include "mbsmooth/metrics.hpp"
#include "mbsmooth/neighbors.hpp"
#include "mbsmooth/weighting.hpp"

namespace mbsmooth {

struct EvalReport {
  double accuracy = 0.0;
  std::size_t n_cases = 0;
  std::optional<std::vector<double>> per_fold;
  std::optional<double> stddev;
  std::map<std::pair<ClassLabel, ClassLabel>, std::size_t> confusion;
};

// Everything needed to instantiate a classifier over a training base.
struct ClassifierSpec {
  WeightScheme scheme = WeightScheme::Uniform;
  std::vector<double> user_weights;  // used when scheme == UserSupplied
  std::optional<std::size_t> bins;   // optional weight discretization
  std::size_t k = 1;
  Voting voting = Voting::Majority;
  std::optional<std::size_t> threads;
};

inline FeatureWeights resolve_weights(const InstanceBase& base,
                                      const ClassifierSpec& spec) {
  FeatureWeights weights =
      spec.scheme == WeightScheme::UserSupplied
          ? user_weights(spec.user_weights)
          : compute_weights(base, spec.scheme);
  if (weights.size() != base.arity()) {
    throw LengthMismatchError("got " + std::to_string(weights.size()) +
                              " weights for arity " +
                              std::to_string(base.arity()));
  }
  if (spec.bins) {
    weights = discretize_weights(weights, *spec.bins);
  }
  return weights;
}

namespace detail {

inline std::size_t resolve_thread_count(std::optional<std::size_t> requested,
                                        std::size_t n_items) {
  std::size_t count = 0;
  if (requested && *requested > 0) {
    count = *requested;
  } else if (const char* env = std::getenv("MBSMOOTH_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) {
      count = static_cast<std::size_t>(parsed);
    }
  }
  if (count == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    count = hw == 0 ? 1 : hw;
  }
  return std::max<std::size_t>(1, std::min(count, std::max<std::size_t>(
                                                      1, n_items)));
}

}  // namespace detail

// Classifies every test case against the base and tallies accuracy plus a
// (gold, predicted) confusion table. Cases are classified concurrently in
// contiguous index blocks; the tally runs in case order afterwards, so the
// report does not depend on thread scheduling.
inline EvalReport evaluate(const InstanceBase& base,
                           std::span<const Instance> test_cases,
                           const ClassifierSpec& spec) {
  const FeatureWeights weights = resolve_weights(base, spec);
  const MetricConfig config = make_metric_config(base, weights);

  const std::size_t n = test_cases.size();
  std::vector<ClassLabel> predicted(n);
  const std::size_t n_threads = detail::resolve_thread_count(spec.threads, n);

  auto classify_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      predicted[i] =
          classify(base, test_cases[i].values, config, spec.k, spec.voting)
              .label;
    }
  };

  if (n_threads <= 1 || n < 2) {
    classify_range(0, n);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, t, begin, end] {
        try {
          classify_range(begin, end);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  EvalReport report;
  report.n_cases = n;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ClassLabel gold = test_cases[i].label;
    if (predicted[i] == gold) ++correct;
    ++report.confusion[{gold, predicted[i]}];
  }
  report.accuracy = n == 0 ? 0.0 : static_cast<double>(correct) / n;
  return report;
}

namespace detail {

// Contiguous split of a seeded shuffle; the first (n mod folds) folds take
// one extra case.
inline std::vector<std::size_t> plain_fold_assignment(std::size_t n,
                                                      std::size_t folds,
                                                      std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> fold_of(n);
  const std::size_t quotient = n / folds;
  const std::size_t remainder = n % folds;
  std::size_t cursor = 0;
  for (std::size_t fold = 0; fold < folds; ++fold) {
    const std::size_t fold_size = quotient + (fold < remainder ? 1 : 0);
    for (std::size_t i = 0; i < fold_size; ++i) fold_of[order[cursor++]] = fold;
  }
  return fold_of;
}

// Shuffles within each label group, then deals each group round-robin so
// every fold sees roughly the full label mix.
inline std::vector<std::size_t> stratified_fold_assignment(
    std::span<const Instance> cases, std::size_t folds,
    std::mt19937_64& rng) {
  std::map<ClassLabel, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    groups[cases[i].label].push_back(i);
  }
  std::vector<std::size_t> fold_of(cases.size());
  std::size_t next_fold = 0;
  for (auto& [label, indices] : groups) {
    std::shuffle(indices.begin(), indices.end(), rng);
    for (std::size_t index : indices) {
      fold_of[index] = next_fold;
      next_fold = (next_fold + 1) % folds;
    }
  }
  return fold_of;
}

}  // namespace detail

// Seeded k-fold cross-validation: a uniform shuffle cut into contiguous
// folds, or a per-label round-robin deal when stratify is set. Weights are
// recomputed per fold from the training portion only. Reported accuracy
// pools correct counts over all cases; stddev is the sample standard
// deviation of the fold accuracies.
inline EvalReport cross_validate(std::span<const Instance> cases,
                                 std::size_t folds, std::uint64_t seed,
                                 const ClassifierSpec& spec,
                                 bool stratify = false) {
  if (folds < 2) {
    throw TooFewCasesError("need at least 2 folds, got " +
                           std::to_string(folds));
  }
  if (cases.size() < folds) {
    throw TooFewCasesError("need at least " + std::to_string(folds) +
                           " cases for " + std::to_string(folds) +
                           " folds, got " + std::to_string(cases.size()));
  }

  const std::size_t n = cases.size();
  std::mt19937_64 rng(seed);
  const std::vector<std::size_t> fold_of =
      stratify ? detail::stratified_fold_assignment(cases, folds, rng)
               : detail::plain_fold_assignment(n, folds, rng);

  EvalReport report;
  report.per_fold = std::vector<double>();
  report.per_fold->reserve(folds);
  std::size_t correct_total = 0;
  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::vector<Instance> train;
    std::vector<Instance> test;
    for (std::size_t i = 0; i < n; ++i) {
      (fold_of[i] == fold ? test : train).push_back(cases[i]);
    }

    const InstanceBase fold_base(std::move(train));
    const EvalReport fold_report = evaluate(fold_base, test, spec);
    report.per_fold->push_back(fold_report.accuracy);
    for (const auto& [key, count] : fold_report.confusion) {
      if (key.first == key.second) correct_total += count;
      report.confusion[key] += count;
    }
  }

  report.n_cases = n;
  report.accuracy = static_cast<double>(correct_total) / n;

  double mean = 0.0;
  for (double acc : *report.per_fold) mean += acc;
  mean /= folds;
  double ss = 0.0;
  for (double acc : *report.per_fold) ss += (acc - mean) * (acc - mean);
  report.stddev = std::sqrt(ss / (folds - 1));
  return report;
}

struct TTestResult {
  double t_statistic = 0.0;
  std::optional<double> p_value;  // absent when the variance is degenerate
  bool significant = false;       // p < 0.05
  bool degenerate = false;        // zero variance of the differences
};

// Two-tailed paired t-test on per-fold accuracies. Zero-variance differences
// are degenerate: all-zero differences report t = 0 (trivially not
// significant), a constant nonzero shift reports a signed infinite t; both
// leave p undefined.
inline TTestResult paired_t_test(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size()) {
    throw LengthMismatchError("paired samples differ in length: " +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
  }
  if (a.size() < 2) {
    throw LengthMismatchError("paired t-test needs at least 2 pairs, got " +
                              std::to_string(a.size()));
  }

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean =
      std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double variance = ss / static_cast<double>(n - 1);

  TTestResult result;
  if (variance <= 0.0) {
    result.degenerate = true;
    if (mean == 0.0) {
      result.t_statistic = 0.0;
    } else {
      result.t_statistic = mean > 0.0
                               ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    }
    return result;
  }

  result.t_statistic =
      mean / std::sqrt(variance / static_cast<double>(n));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  result.p_value =
      2.0 * boost::math::cdf(boost::math::complement(
                dist, std::abs(result.t_statistic)));
  result.significant = *result.p_value < 0.05;
  return result;
}

}  // namespace mbsmooth
