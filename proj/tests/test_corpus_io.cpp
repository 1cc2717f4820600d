#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mbsmooth/corpus_io.hpp"

using namespace mbsmooth;

TEST_CASE("case lines parse into instances in order", "[corpus_io]") {
  std::istringstream in(
      "ate pizza with fork V\n"
      "\n"
      "ate pizza with anchovies N\n");
  const std::vector<Instance> instances = parse_case_stream(in);
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].values.size() == 4);
  CHECK(std::get<Symbol>(instances[0].values[0]) == Symbol("ate"));
  CHECK(std::get<Symbol>(instances[0].values[3]) == Symbol("fork"));
  CHECK(instances[0].label == ClassLabel("V"));
  CHECK(instances[1].label == ClassLabel("N"));
}

TEST_CASE("a short row reports its line number", "[corpus_io]") {
  std::istringstream in(
      "ate pizza with fork V\n"
      "\n"
      "ate pizza with fork\n");
  try {
    parse_case_stream(in);
    FAIL("expected RaggedRowError");
  } catch (const RaggedRowError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("an empty stream has no cases", "[corpus_io]") {
  std::istringstream in("\n  \n");
  CHECK_THROWS_AS(parse_case_stream(in), EmptyFileError);
}

TEST_CASE("an explicit delimiter splits the comma form", "[corpus_io]") {
  std::istringstream in("ate,pizza,with,fork,V\n");
  const std::vector<Instance> instances = parse_case_stream(in, ',');
  REQUIRE(instances.size() == 1);
  CHECK(std::get<Symbol>(instances[0].values[2]) == Symbol("with"));
  CHECK(instances[0].label == ClassLabel("V"));

  std::istringstream bad("ate,,with,fork,V\n");
  CHECK_THROWS_AS(parse_case_stream(bad, ','), ParseError);
}

TEST_CASE("parse, serialize, parse round-trips", "[corpus_io]") {
  std::istringstream in(
      "ate pizza with fork V\n"
      "ran races over hills N\n");
  const std::vector<Instance> first = parse_case_stream(in);
  std::ostringstream out;
  write_case_stream(out, first);
  std::istringstream again(out.str());
  const std::vector<Instance> second = parse_case_stream(again);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].values == second[i].values);
    CHECK(first[i].label == second[i].label);
  }
}

TEST_CASE("numeric instances do not serialize as case files", "[corpus_io]") {
  Instance numeric;
  numeric.values.emplace_back(NumericVector{1.0});
  numeric.label = ClassLabel("V");
  std::ostringstream out;
  const std::vector<Instance> instances = {numeric};
  CHECK_THROWS_AS(write_case_stream(out, instances), KindMismatchError);
}

TEST_CASE("vector lexicon enforces one dimension", "[corpus_io]") {
  std::istringstream in(
      "pizza 0.1 0.2\n"
      "fork -0.3 0.4\n");
  const VectorLexicon lexicon = load_vector_lexicon_stream(in);
  CHECK(lexicon.dimension == 2);
  CHECK(lexicon.entries.at("fork") == NumericVector{-0.3, 0.4});
  CHECK(lexicon.duplicate_count == 0);

  std::istringstream bad(
      "pizza 0.1 0.2\n"
      "fork 0.3\n");
  CHECK_THROWS_AS(load_vector_lexicon_stream(bad), DimensionMismatchError);

  std::istringstream garbage("pizza 0.1 soup\n");
  CHECK_THROWS_AS(load_vector_lexicon_stream(garbage), ParseError);
}

TEST_CASE("duplicate lexicon tokens keep the last entry", "[corpus_io]") {
  std::istringstream in(
      "pizza 0.1 0.2\n"
      "pizza 0.9 0.8\n");
  const VectorLexicon lexicon = load_vector_lexicon_stream(in);
  CHECK(lexicon.entries.at("pizza") == NumericVector{0.9, 0.8});
  CHECK(lexicon.duplicate_count == 1);
}

TEST_CASE("vectorization swaps tokens for vectors", "[corpus_io]") {
  std::istringstream lex_in(
      "a 1 0\n"
      "x 0 1\n");
  const VectorLexicon lexicon = load_vector_lexicon_stream(lex_in);
  std::istringstream case_in("a x V\n");
  const std::vector<Instance> cases = parse_case_stream(case_in);

  const std::vector<Instance> mapped =
      vectorize_cases(cases, lexicon, LexiconFallback::Zero);
  REQUIRE(mapped.size() == 1);
  CHECK(mapped[0].label == ClassLabel("V"));
  CHECK(std::get<NumericVector>(mapped[0].values[0]) == NumericVector{1, 0});
  CHECK(std::get<NumericVector>(mapped[0].values[1]) == NumericVector{0, 1});
}

TEST_CASE("out-of-lexicon tokens follow the fallback policy", "[corpus_io]") {
  std::istringstream lex_in("a 1 0\n");
  const VectorLexicon lexicon = load_vector_lexicon_stream(lex_in);
  std::istringstream case_in("a x V\n");
  const std::vector<Instance> cases = parse_case_stream(case_in);

  const std::vector<Instance> zeroed =
      vectorize_cases(cases, lexicon, LexiconFallback::Zero);
  CHECK(std::get<NumericVector>(zeroed[0].values[1]) == NumericVector{0, 0});

  try {
    vectorize_cases(cases, lexicon, LexiconFallback::Error);
    FAIL("expected MissingTokenError");
  } catch (const MissingTokenError& e) {
    CHECK(e.token() == "x");
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
}

TEST_CASE("tagged corpus splits sentences on blank lines", "[corpus_io]") {
  std::istringstream in(
      "The DT\n"
      "Bonds NNS\n"
      "rallied VBD\n"
      "\n"
      "Prices NNS\n"
      "fell VBD\n");
  const std::vector<TaggedSentence> corpus = read_tagged_corpus_stream(in);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].size() == 3);
  CHECK(corpus[0][1].word == "Bonds");
  CHECK(corpus[1][0].tag == "NNS");

  std::istringstream bad("word tag extra\n");
  CHECK_THROWS_AS(read_tagged_corpus_stream(bad), ParseError);
}

TEST_CASE("tag lexicons come from files or the corpus itself", "[corpus_io]") {
  std::istringstream in("rallied VBD VBN\n");
  const TagLexicon from_file = load_tag_lexicon_stream(in);
  CHECK(from_file.at("rallied") ==
        std::set<std::string>{"VBD", "VBN"});

  std::istringstream corpus_in(
      "rallied VBD\n"
      "\n"
      "rallied VBN\n");
  const TagLexicon from_corpus =
      build_tag_lexicon(read_tagged_corpus_stream(corpus_in));
  CHECK(from_corpus.at("rallied") == std::set<std::string>{"VBD", "VBN"});
}

TEST_CASE("feature templates accept only p, d, a, s", "[corpus_io]") {
  CHECK(FeatureTemplate("pdass").arity() == 5);
  CHECK(FeatureTemplate("pdddaaasss").arity() == 10);
  CHECK_THROWS_AS(FeatureTemplate(""), InvalidTemplateError);
  CHECK_THROWS_AS(FeatureTemplate("pdxss"), InvalidTemplateError);
}

TEST_CASE("extraction builds the documented feature layout", "[corpus_io]") {
  const std::vector<TaggedSentence> corpus = {
      {{"The", "DT"}, {"Bonds", "NNS"}, {"rallied", "VBD"}}};
  TagLexicon lexicon;
  lexicon["rallied"] = {"VBD", "VBN"};

  const std::vector<Instance> cases = extract_unknown_word_cases(
      corpus, FeatureTemplate("pdass"), lexicon);
  // "The" is tagged DT (closed class): only "Bonds" and "rallied" qualify.
  REQUIRE(cases.size() == 2);

  const Instance& bonds = cases[0];
  CHECK(std::get<Symbol>(bonds.values[0]) == Symbol("B"));        // p
  CHECK(std::get<Symbol>(bonds.values[1]) == Symbol("DT"));       // d
  CHECK(std::get<Symbol>(bonds.values[2]) == Symbol("VBD-VBN"));  // a
  CHECK(std::get<Symbol>(bonds.values[3]) == Symbol("s"));        // s1
  CHECK(std::get<Symbol>(bonds.values[4]) == Symbol("d"));        // s2
  CHECK(bonds.label == ClassLabel("NNS"));

  // "rallied" is sentence-final: its a feature is the boundary marker; its
  // left tag is the gold NNS; its word is absent from the tag lexicon.
  const Instance& rallied = cases[1];
  CHECK(std::get<Symbol>(rallied.values[1]) == Symbol("NNS"));
  CHECK(std::get<Symbol>(rallied.values[2]) == Symbol("_"));
}

TEST_CASE("short words pad their suffix window", "[corpus_io]") {
  const std::vector<TaggedSentence> corpus = {{{"on", "NN"}}};
  const std::vector<Instance> cases = extract_unknown_word_cases(
      corpus, FeatureTemplate("ss"), build_tag_lexicon(corpus));
  REQUIRE(cases.size() == 1);
  CHECK(std::get<Symbol>(cases[0].values[0]) == Symbol("n"));
  CHECK(std::get<Symbol>(cases[0].values[1]) == Symbol("_"));
}

TEST_CASE("sentence-initial words take the boundary tag", "[corpus_io]") {
  const std::vector<TaggedSentence> corpus = {
      {{"Prices", "NNS"}, {"fell", "VBD"}}};
  const std::vector<Instance> cases = extract_unknown_word_cases(
      corpus, FeatureTemplate("d"), build_tag_lexicon(corpus));
  REQUIRE(cases.size() == 2);
  CHECK(std::get<Symbol>(cases[0].values[0]) == Symbol("_"));
  CHECK(std::get<Symbol>(cases[1].values[0]) == Symbol("NNS"));
}

TEST_CASE("extraction arity always equals the template length",
          "[corpus_io]") {
  const std::vector<TaggedSentence> corpus = {
      {{"a", "NN"}, {"bb", "VBD"}, {"ccc", "JJ"}, {"dddd", "RB"}}};
  for (const std::string& code : {"pdass", "pdddaaasss", "p", "sss"}) {
    const FeatureTemplate feature_template(code);
    for (const Instance& inst : extract_unknown_word_cases(
             corpus, feature_template, build_tag_lexicon(corpus))) {
      CHECK(inst.values.size() == feature_template.arity());
    }
  }
}
