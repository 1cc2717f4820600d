// mbsmooth: memory-based classification and back-off smoothing toolkit.
//
// Subcommands cover the full pipeline: weight computation, k-NN
// classification, back-off estimation, train/test and cross-validated
// evaluation, unknown-word case extraction, and a randomized check that the
// back-off estimator and the k=1 classifier agree.
//
// All machine-readable output goes to stdout as JSON (JSON lines for
// per-case subcommands); a human-readable summary goes to stderr unless
// --quiet is given. Exit code 0 on success, 1 on any error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbsmooth/mbsmooth.hpp"

namespace {

using nlohmann::ordered_json;
using namespace mbsmooth;

char parse_delimiter(const std::string& text) {
  if (text.empty()) return '\0';
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() == 1) return text[0];
  throw ParseError("--delimiter must be a single character, got '" + text +
                   "'");
}

ordered_json distribution_json(const ClassDistribution& dist) {
  ordered_json out = ordered_json::object();
  for (const auto& [label, mass] : dist.mass) {
    out[std::string(label.text())] = mass;
  }
  return out;
}

ordered_json report_json(const EvalReport& report) {
  ordered_json out;
  out["accuracy"] = report.accuracy;
  out["n_cases"] = report.n_cases;
  if (report.per_fold) out["per_fold"] = *report.per_fold;
  if (report.stddev) out["stddev"] = *report.stddev;
  ordered_json confusion = ordered_json::array();
  for (const auto& [key, count] : report.confusion) {
    confusion.push_back({{"gold", std::string(key.first.text())},
                         {"predicted", std::string(key.second.text())},
                         {"count", count}});
  }
  out["confusion"] = confusion;
  return out;
}

void print_report_table(const EvalReport& report) {
  std::fprintf(stderr, "accuracy %.4f on %zu cases\n", report.accuracy,
               report.n_cases);
  if (report.per_fold) {
    std::fprintf(stderr, "per-fold:");
    for (double acc : *report.per_fold) std::fprintf(stderr, " %.4f", acc);
    std::fprintf(stderr, "\n");
  }
  if (report.stddev) std::fprintf(stderr, "stddev %.4f\n", *report.stddev);
}

// Query files reuse the case format; rows may carry the class token (it is
// echoed back as "gold") or omit it.
struct QuerySet {
  std::vector<Pattern> patterns;
  std::vector<std::optional<ClassLabel>> gold;
};

QuerySet parse_query_file(const std::string& path, std::size_t arity,
                          char delimiter) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open query file '" + path + "'");
  QuerySet queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    const std::vector<std::string> tokens =
        detail::tokenize_line(line, delimiter, line_no);
    if (tokens.empty()) continue;
    if (tokens.size() != arity && tokens.size() != arity + 1) {
      throw RaggedRowError("line " + std::to_string(line_no) + " has " +
                               std::to_string(tokens.size()) +
                               " tokens, expected " + std::to_string(arity) +
                               " or " + std::to_string(arity + 1),
                           line_no);
    }
    Pattern pattern;
    pattern.reserve(arity);
    for (std::size_t f = 0; f < arity; ++f) {
      pattern.emplace_back(Symbol(tokens[f]));
    }
    queries.patterns.push_back(std::move(pattern));
    queries.gold.push_back(tokens.size() == arity + 1
                               ? std::optional<ClassLabel>(
                                     ClassLabel(tokens.back()))
                               : std::nullopt);
  }
  if (queries.patterns.empty()) {
    throw EmptyFileError("no queries found in '" + path + "'");
  }
  return queries;
}

std::vector<double> parse_lambdas(const std::string& csv) {
  std::vector<double> lambdas;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    lambdas.push_back(detail::parse_double(item, 0));
  }
  return lambdas;
}

// Shared classifier flags for classify/eval/cv.
struct ClassifierFlags {
  std::string metric = "overlap";
  std::size_t k = 1;
  std::string voting = "majority";
  std::optional<std::size_t> bins;
  std::optional<std::size_t> threads;
  std::string vectors_path;
  std::string fallback = "zero";

  void attach(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "Distance metric / weighting")
        ->check(CLI::IsMember({"overlap", "ig", "cosine"}));
    cmd->add_option("--k", k, "Number of nearest-distance groups");
    cmd->add_option("--voting", voting, "Vote weighting among neighbors")
        ->check(CLI::IsMember({"majority", "dudani"}));
    cmd->add_option("--bins", bins, "Discretize weights into N bins");
    cmd->add_option("--threads", threads, "Evaluation thread cap");
    cmd->add_option("--vectors", vectors_path,
                    "Vector lexicon; required for --metric cosine");
    cmd->add_option("--fallback", fallback,
                    "Out-of-lexicon policy for --vectors")
        ->check(CLI::IsMember({"zero", "error"}));
  }

  Voting voting_mode() const {
    return voting == "dudani" ? Voting::Dudani : Voting::Majority;
  }
};

// Resolves the metric flag into a ready base + classifier spec. For cosine,
// the symbolic cases are mapped through the vector lexicon and the
// information-gain weights computed on the symbolic base carry over.
struct PreparedClassifier {
  InstanceBase base;
  ClassifierSpec spec;
};

PreparedClassifier prepare_classifier(std::vector<Instance> train,
                                      const ClassifierFlags& flags) {
  ClassifierSpec spec;
  spec.k = flags.k;
  spec.voting = flags.voting_mode();
  spec.bins = flags.bins;
  spec.threads = flags.threads;

  if (flags.metric == "cosine") {
    if (flags.vectors_path.empty()) {
      throw ParseError("--metric cosine requires --vectors");
    }
    const InstanceBase symbolic_base(train);
    const FeatureWeights ig =
        compute_weights(symbolic_base, WeightScheme::InformationGain);
    const VectorLexicon lexicon = load_vector_lexicon(flags.vectors_path);
    const LexiconFallback fallback = flags.fallback == "error"
                                         ? LexiconFallback::Error
                                         : LexiconFallback::Zero;
    std::vector<Instance> vectorized =
        vectorize_cases(train, lexicon, fallback);
    spec.scheme = WeightScheme::UserSupplied;
    spec.user_weights = ig.values;
    return PreparedClassifier{InstanceBase(std::move(vectorized)),
                              std::move(spec)};
  }

  spec.scheme = flags.metric == "ig" ? WeightScheme::InformationGain
                                     : WeightScheme::Uniform;
  return PreparedClassifier{InstanceBase(std::move(train)), std::move(spec)};
}

// Maps query patterns through the same lexicon as the training base.
std::vector<Pattern> vectorize_patterns(const std::vector<Pattern>& patterns,
                                        const ClassifierFlags& flags) {
  const VectorLexicon lexicon = load_vector_lexicon(flags.vectors_path);
  const LexiconFallback fallback = flags.fallback == "error"
                                       ? LexiconFallback::Error
                                       : LexiconFallback::Zero;
  std::vector<Instance> as_cases;
  as_cases.reserve(patterns.size());
  for (const Pattern& pattern : patterns) {
    as_cases.push_back(Instance{pattern, ClassLabel()});
  }
  std::vector<Instance> mapped = vectorize_cases(as_cases, lexicon, fallback);
  std::vector<Pattern> out;
  out.reserve(mapped.size());
  for (Instance& inst : mapped) out.push_back(std::move(inst.values));
  return out;
}

int run_weights(const std::string& train_path, char delimiter,
                const std::string& scheme, std::optional<std::size_t> bins,
                bool quiet) {
  const InstanceBase base(parse_case_file(train_path, delimiter));
  ClassifierSpec spec;
  spec.scheme = scheme == "uniform" ? WeightScheme::Uniform
                                    : WeightScheme::InformationGain;
  spec.bins = bins;
  const FeatureWeights weights = resolve_weights(base, spec);

  ordered_json out;
  out["scheme"] = scheme;
  if (bins) out["bins"] = *bins;
  out["weights"] = weights.values;
  std::cout << out.dump() << "\n";

  if (!quiet) {
    for (std::size_t f = 0; f < weights.size(); ++f) {
      std::fprintf(stderr, "feature %zu  weight %.6f\n", f + 1,
                   weights.values[f]);
    }
  }
  return 0;
}

int run_classify(const std::string& train_path, const std::string& input_path,
                 char delimiter, const ClassifierFlags& flags, bool quiet) {
  std::vector<Instance> train = parse_case_file(train_path, delimiter);
  const std::size_t arity = train.front().values.size();
  QuerySet queries = parse_query_file(input_path, arity, delimiter);

  PreparedClassifier prepared = prepare_classifier(std::move(train), flags);
  std::vector<Pattern> patterns =
      flags.metric == "cosine" ? vectorize_patterns(queries.patterns, flags)
                               : std::move(queries.patterns);

  const FeatureWeights weights = resolve_weights(prepared.base, prepared.spec);
  const MetricConfig config = make_metric_config(prepared.base, weights);

  std::size_t correct = 0;
  std::size_t gold_seen = 0;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Classification result = classify(prepared.base, patterns[i], config,
                                           prepared.spec.k,
                                           prepared.spec.voting);
    ordered_json line;
    line["label"] = std::string(result.label.text());
    line["distribution"] = distribution_json(result.distribution);
    if (queries.gold[i]) {
      line["gold"] = std::string(queries.gold[i]->text());
      ++gold_seen;
      if (*queries.gold[i] == result.label) ++correct;
    }
    std::cout << line.dump() << "\n";
    if (!quiet) {
      std::fprintf(stderr, "case %zu -> %s\n", i + 1,
                   std::string(result.label.text()).c_str());
    }
  }
  if (!quiet && gold_seen > 0) {
    std::fprintf(stderr, "%zu/%zu labeled cases correct\n", correct,
                 gold_seen);
  }
  return 0;
}

int run_backoff(const std::string& train_path, const std::string& input_path,
                char delimiter, const std::string& mode,
                const std::string& lambdas_csv, bool quiet) {
  const InstanceBase base(parse_case_file(train_path, delimiter));
  QuerySet queries = parse_query_file(input_path, base.arity(), delimiter);

  std::optional<InterpolationConfig> interp;
  if (!lambdas_csv.empty()) {
    interp = InterpolationConfig{parse_lambdas(lambdas_csv)};
  } else if (mode == "interp") {
    throw InvalidLambdasError("--mode interp requires --lambdas");
  }
  FeatureWeights ig;
  if (mode == "ig") {
    ig = compute_weights(base, WeightScheme::InformationGain);
  }

  for (std::size_t i = 0; i < queries.patterns.size(); ++i) {
    const Pattern& pattern = queries.patterns[i];
    ordered_json line;
    if (interp) {
      const ClassDistribution dist =
          interpolation_estimate(base, pattern, *interp);
      line["distribution"] = distribution_json(dist);
    } else if (mode == "ig") {
      const IgBackoffResult result = ig_backoff_estimate(base, pattern, ig);
      line["distribution"] = distribution_json(result.distribution);
      line["step"] = result.step.level;
      line["step_distance"] = result.step.distance;
    } else {
      const BackoffResult result = naive_backoff_estimate(base, pattern);
      line["distribution"] = distribution_json(result.distribution);
      line["level"] = result.level_used;
    }
    std::cout << line.dump() << "\n";
    if (!quiet) std::fprintf(stderr, "case %zu estimated\n", i + 1);
  }
  return 0;
}

int run_eval(const std::string& train_path, const std::string& test_path,
             char delimiter, const ClassifierFlags& flags, bool quiet) {
  std::vector<Instance> train = parse_case_file(train_path, delimiter);
  std::vector<Instance> test = parse_case_file(test_path, delimiter);
  PreparedClassifier prepared = prepare_classifier(std::move(train), flags);
  if (flags.metric == "cosine") {
    const VectorLexicon lexicon = load_vector_lexicon(flags.vectors_path);
    const LexiconFallback fallback = flags.fallback == "error"
                                         ? LexiconFallback::Error
                                         : LexiconFallback::Zero;
    test = vectorize_cases(test, lexicon, fallback);
  }
  const EvalReport report = evaluate(prepared.base, test, prepared.spec);
  std::cout << report_json(report).dump() << "\n";
  if (!quiet) print_report_table(report);
  return 0;
}

int run_cv(const std::string& cases_path, char delimiter, std::size_t folds,
           std::uint64_t seed, bool stratify, const ClassifierFlags& flags,
           bool quiet) {
  std::vector<Instance> cases = parse_case_file(cases_path, delimiter);
  if (flags.metric == "cosine") {
    throw ParseError("cv does not support --metric cosine");
  }
  ClassifierSpec spec;
  spec.scheme = flags.metric == "ig" ? WeightScheme::InformationGain
                                     : WeightScheme::Uniform;
  spec.k = flags.k;
  spec.voting = flags.voting_mode();
  spec.bins = flags.bins;
  spec.threads = flags.threads;
  const EvalReport report =
      cross_validate(cases, folds, seed, spec, stratify);
  std::cout << report_json(report).dump() << "\n";
  if (!quiet) print_report_table(report);
  return 0;
}

int run_extract(const std::string& corpus_path,
                const std::string& template_code,
                const std::string& lexicon_path, const std::string& tags_csv,
                bool quiet) {
  const std::vector<TaggedSentence> corpus = read_tagged_corpus(corpus_path);
  const FeatureTemplate feature_template(template_code);
  const TagLexicon lexicon = lexicon_path.empty()
                                 ? build_tag_lexicon(corpus)
                                 : load_tag_lexicon(lexicon_path);
  std::set<std::string> open_class = default_open_class_tags();
  if (!tags_csv.empty()) {
    open_class.clear();
    std::stringstream in(tags_csv);
    std::string tag;
    while (std::getline(in, tag, ',')) {
      if (!tag.empty()) open_class.insert(tag);
    }
  }
  const std::vector<Instance> cases = extract_unknown_word_cases(
      corpus, feature_template, lexicon, open_class);
  write_case_stream(std::cout, cases);
  if (!quiet) {
    std::fprintf(stderr, "extracted %zu cases of arity %zu\n", cases.size(),
                 feature_template.arity());
  }
  return 0;
}

// --- check-equivalence support ----------------------------------------------

struct RandomCorpusParams {
  std::size_t min_arity = 2, max_arity = 5;
  std::size_t max_values = 4;
  std::size_t max_classes = 3;
  std::size_t max_instances = 50;
};

std::vector<Instance> random_base(std::mt19937_64& rng,
                                  const RandomCorpusParams& params,
                                  std::size_t trial) {
  std::uniform_int_distribution<std::size_t> arity_dist(params.min_arity,
                                                        params.max_arity);
  const std::size_t arity = arity_dist(rng);
  std::uniform_int_distribution<std::size_t> values_dist(2, params.max_values);
  std::vector<std::size_t> values_per_feature(arity);
  for (auto& v : values_per_feature) v = values_dist(rng);
  std::uniform_int_distribution<std::size_t> classes_dist(2,
                                                          params.max_classes);
  const std::size_t n_classes = classes_dist(rng);
  std::uniform_int_distribution<std::size_t> size_dist(1,
                                                       params.max_instances);
  const std::size_t n = size_dist(rng);

  const std::string stamp = std::to_string(trial);
  std::vector<Instance> instances(n);
  for (Instance& inst : instances) {
    inst.values.reserve(arity);
    for (std::size_t f = 0; f < arity; ++f) {
      std::uniform_int_distribution<std::size_t> pick(
          0, values_per_feature[f] - 1);
      inst.values.emplace_back(Symbol("v" + stamp + "_" + std::to_string(f) +
                                      "_" + std::to_string(pick(rng))));
    }
    std::uniform_int_distribution<std::size_t> pick(0, n_classes - 1);
    inst.label = ClassLabel("c" + stamp + "_" + std::to_string(pick(rng)));
  }
  return instances;
}

// A query feature is drawn from the base's inventory or, with the same
// probability as any one value, a token the base has never seen — that is
// what forces the back-off walk past level 0.
Pattern random_query(std::mt19937_64& rng, const InstanceBase& base) {
  Pattern pattern;
  pattern.reserve(base.arity());
  for (std::size_t f = 0; f < base.arity(); ++f) {
    std::vector<Symbol> options(base.value_inventory(f).begin(),
                                base.value_inventory(f).end());
    options.push_back(Symbol("novel_" + std::to_string(f)));
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    pattern.emplace_back(options[pick(rng)]);
  }
  return pattern;
}

int run_check_equivalence(const std::string& cases_path, char delimiter,
                          std::size_t trials, std::uint64_t seed,
                          bool quiet) {
  std::mt19937_64 rng(seed);
  std::optional<InstanceBase> fixed_base;
  if (!cases_path.empty()) {
    fixed_base.emplace(parse_case_file(cases_path, delimiter));
  }

  std::size_t passed = 0;
  double worst_diff = 0.0;
  std::optional<ordered_json> first_failure;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const InstanceBase base =
        fixed_base ? *fixed_base
                   : InstanceBase(random_base(rng, RandomCorpusParams{},
                                              trial));
    const Pattern query = random_query(rng, base);
    const EquivalenceReport report = equivalence_check(base, query);
    worst_diff = std::max(worst_diff, report.max_abs_diff);
    if (report.pass) {
      ++passed;
    } else if (!first_failure) {
      ordered_json failure;
      failure["trial"] = trial;
      failure["backoff_level"] = report.backoff_level;
      failure["knn_hamming"] = report.knn_hamming;
      failure["max_abs_diff"] = report.max_abs_diff;
      first_failure = failure;
    }
  }

  ordered_json out;
  out["trials"] = trials;
  out["passed"] = passed;
  out["failed"] = trials - passed;
  out["max_abs_diff"] = worst_diff;
  if (first_failure) out["first_failure"] = *first_failure;
  std::cout << out.dump() << "\n";
  if (!quiet) {
    std::fprintf(stderr, "%zu/%zu equivalence trials passed\n", passed,
                 trials);
  }
  return passed == trials ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Memory-based classification and back-off smoothing toolkit"};
  app.require_subcommand(1);

  bool quiet = false;
  std::string delimiter_text;
  // Registered on every subcommand so they can appear after the verb.
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--quiet", quiet, "Suppress the stderr summary");
    cmd->add_option("--delimiter", delimiter_text,
                    "Case-file field delimiter (default: whitespace)");
  };

  // weights
  auto* weights_cmd =
      app.add_subcommand("weights", "Compute feature weights");
  std::string weights_train, weights_scheme = "ig";
  std::optional<std::size_t> weights_bins;
  weights_cmd->add_option("--train", weights_train, "Training case file")
      ->required();
  weights_cmd->add_option("--scheme", weights_scheme, "Weighting scheme")
      ->check(CLI::IsMember({"ig", "uniform"}));
  weights_cmd->add_option("--bins", weights_bins,
                          "Discretize weights into N bins");
  add_common(weights_cmd);

  // classify
  auto* classify_cmd =
      app.add_subcommand("classify", "Classify query patterns");
  std::string classify_train, classify_input;
  ClassifierFlags classify_flags;
  classify_cmd->add_option("--train", classify_train, "Training case file")
      ->required();
  classify_cmd->add_option("--input", classify_input, "Query pattern file")
      ->required();
  classify_flags.attach(classify_cmd);
  add_common(classify_cmd);

  // backoff
  auto* backoff_cmd =
      app.add_subcommand("backoff", "Estimate class distributions");
  std::string backoff_train, backoff_input, backoff_mode = "naive";
  std::string backoff_lambdas;
  backoff_cmd->add_option("--train", backoff_train, "Training case file")
      ->required();
  backoff_cmd->add_option("--input", backoff_input, "Query pattern file")
      ->required();
  backoff_cmd->add_option("--mode", backoff_mode, "Estimator")
      ->check(CLI::IsMember({"naive", "ig", "interp"}));
  backoff_cmd->add_option("--lambdas", backoff_lambdas,
                          "Fixed interpolation coefficients (CSV, most to "
                          "least specific)");
  add_common(backoff_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Train/test evaluation");
  std::string eval_train, eval_test;
  ClassifierFlags eval_flags;
  eval_cmd->add_option("--train", eval_train, "Training case file")
      ->required();
  eval_cmd->add_option("--test", eval_test, "Test case file")->required();
  eval_flags.attach(eval_cmd);
  add_common(eval_cmd);

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validated evaluation");
  std::string cv_cases;
  std::size_t cv_folds = 10;
  std::uint64_t cv_seed = 1;
  bool cv_stratify = false;
  ClassifierFlags cv_flags;
  cv_cmd->add_option("--cases", cv_cases, "Case file")->required();
  cv_cmd->add_option("--folds", cv_folds, "Fold count");
  cv_cmd->add_option("--seed", cv_seed, "Shuffle seed");
  cv_cmd->add_flag("--stratify", cv_stratify,
                   "Per-label round-robin fold assignment");
  cv_flags.attach(cv_cmd);
  add_common(cv_cmd);

  // extract
  auto* extract_cmd = app.add_subcommand(
      "extract", "Extract unknown-word cases from a tagged corpus");
  std::string extract_corpus, extract_template, extract_lexicon, extract_tags;
  extract_cmd->add_option("--corpus", extract_corpus, "Tagged corpus file")
      ->required();
  extract_cmd
      ->add_option("--template", extract_template,
                   "Feature layout over {p,d,a,s}, e.g. pdass")
      ->required();
  extract_cmd->add_option("--lexicon", extract_lexicon,
                          "Tag lexicon file (default: built from the corpus)");
  extract_cmd->add_option("--tags", extract_tags,
                          "Open-class tag list (CSV; default: Penn "
                          "nouns/verbs/adjectives/adverbs)");
  add_common(extract_cmd);

  // check-equivalence
  auto* check_cmd = app.add_subcommand(
      "check-equivalence",
      "Verify the back-off estimator matches the k=1 classifier");
  std::string check_cases;
  std::size_t check_trials = 1000;
  std::uint64_t check_seed = 1;
  check_cmd->add_option("--cases", check_cases,
                        "Case file to use as the base (default: random "
                        "bases)");
  check_cmd->add_option("--trials", check_trials, "Number of random trials");
  check_cmd->add_option("--seed", check_seed, "Random seed");
  add_common(check_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    const char delimiter = parse_delimiter(delimiter_text);
    if (app.got_subcommand(weights_cmd)) {
      return run_weights(weights_train, delimiter, weights_scheme,
                         weights_bins, quiet);
    }
    if (app.got_subcommand(classify_cmd)) {
      return run_classify(classify_train, classify_input, delimiter,
                          classify_flags, quiet);
    }
    if (app.got_subcommand(backoff_cmd)) {
      return run_backoff(backoff_train, backoff_input, delimiter,
                         backoff_mode, backoff_lambdas, quiet);
    }
    if (app.got_subcommand(eval_cmd)) {
      return run_eval(eval_train, eval_test, delimiter, eval_flags, quiet);
    }
    if (app.got_subcommand(cv_cmd)) {
      return run_cv(cv_cases, delimiter, cv_folds, cv_seed, cv_stratify,
                    cv_flags, quiet);
    }
    if (app.got_subcommand(extract_cmd)) {
      return run_extract(extract_corpus, extract_template, extract_lexicon,
                         extract_tags, quiet);
    }
    if (app.got_subcommand(check_cmd)) {
      return run_check_equivalence(check_cases, delimiter, check_trials,
                                   check_seed, quiet);
    }
    std::fprintf(stderr, "error: no subcommand\n");
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
