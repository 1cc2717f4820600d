#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mbsmooth/instance.hpp"

namespace mbsmooth {

namespace detail {

// Splits a line into tokens. A '\0' delimiter means "any whitespace run";
// an explicit delimiter splits on every occurrence and rejects empty fields.
inline std::vector<std::string> tokenize_line(const std::string& line,
                                              char delimiter,
                                              std::size_t line_no) {
  std::vector<std::string> tokens;
  if (delimiter == '\0') {
    std::istringstream in(line);
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    std::string token = line.substr(start, pos - start);
    // Trailing carriage returns from CRLF files are not data.
    while (!token.empty() && (token.back() == '\r' || token.back() == '\n')) {
      token.pop_back();
    }
    if (token.empty() && !(tokens.empty() && pos == std::string::npos)) {
      throw ParseError("empty field on line " + std::to_string(line_no));
    }
    if (!token.empty()) tokens.push_back(std::move(token));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return tokens;
}

inline bool blank_line(const std::string& line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("'" + std::string(token) + "' on line " +
                     std::to_string(line_no) + " is not a number");
  }
  return value;
}

}  // namespace detail

// Reads a case stream: one case per non-empty line, feature tokens followed
// by the class token. The first data line fixes the arity.
inline std::vector<Instance> parse_case_stream(std::istream& in,
                                               char delimiter = '\0') {
  std::vector<Instance> instances;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row_width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    std::vector<std::string> tokens =
        detail::tokenize_line(line, delimiter, line_no);
    if (tokens.empty()) continue;
    if (row_width == 0) {
      if (tokens.size() < 2) {
        throw RaggedRowError("line " + std::to_string(line_no) +
                                 " has " + std::to_string(tokens.size()) +
                                 " token(s); a case needs at least one "
                                 "feature and a class",
                             line_no);
      }
      row_width = tokens.size();
    } else if (tokens.size() != row_width) {
      throw RaggedRowError("line " + std::to_string(line_no) + " has " +
                               std::to_string(tokens.size()) +
                               " tokens, expected " +
                               std::to_string(row_width),
                           line_no);
    }
    Instance inst;
    inst.values.reserve(row_width - 1);
    for (std::size_t f = 0; f + 1 < tokens.size(); ++f) {
      inst.values.emplace_back(Symbol(tokens[f]));
    }
    inst.label = ClassLabel(tokens.back());
    instances.push_back(std::move(inst));
  }
  if (instances.empty()) {
    throw EmptyFileError("no cases found");
  }
  return instances;
}

inline std::vector<Instance> parse_case_file(
    const std::filesystem::path& path, char delimiter = '\0') {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open case file '" + path.string() + "'");
  }
  try {
    return parse_case_stream(in, delimiter);
  } catch (const EmptyFileError&) {
    throw EmptyFileError("no cases found in '" + path.string() + "'");
  }
}

// Writes symbolic instances back in case-file format, one case per line.
inline void write_case_stream(std::ostream& out,
                              std::span<const Instance> instances,
                              char delimiter = ' ') {
  const char sep = delimiter == '\0' ? ' ' : delimiter;
  for (const Instance& inst : instances) {
    for (const FeatureValue& v : inst.values) {
      if (!is_symbol(v)) {
        throw KindMismatchError("case files hold symbolic features only");
      }
      out << std::get<Symbol>(v).text() << sep;
    }
    out << inst.label.text() << '\n';
  }
}

// A token-to-vector table with one shared dimension.
struct VectorLexicon {
  std::size_t dimension = 0;
  std::unordered_map<std::string, NumericVector> entries;
  std::size_t duplicate_count = 0;  // later lines overwrote earlier ones
};

inline VectorLexicon load_vector_lexicon_stream(std::istream& in) {
  VectorLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    std::vector<std::string> tokens =
        detail::tokenize_line(line, '\0', line_no);
    if (tokens.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       " needs a token and at least one component");
    }
    if (lexicon.dimension == 0) {
      lexicon.dimension = tokens.size() - 1;
    } else if (tokens.size() - 1 != lexicon.dimension) {
      throw DimensionMismatchError(
          "line " + std::to_string(line_no) + " has " +
          std::to_string(tokens.size() - 1) + " components, expected " +
          std::to_string(lexicon.dimension));
    }
    NumericVector vec;
    vec.reserve(lexicon.dimension);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      vec.push_back(detail::parse_double(tokens[i], line_no));
    }
    auto [it, inserted] = lexicon.entries.emplace(tokens[0], std::move(vec));
    if (!inserted) {
      it->second.assign(tokens.size() - 1, 0.0);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        it->second[i - 1] = detail::parse_double(tokens[i], line_no);
      }
      ++lexicon.duplicate_count;
    }
  }
  if (lexicon.entries.empty()) {
    throw EmptyFileError("no lexicon entries found");
  }
  return lexicon;
}

inline VectorLexicon load_vector_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open vector lexicon '" + path.string() + "'");
  }
  return load_vector_lexicon_stream(in);
}

enum class LexiconFallback { Zero, Error };

// Swaps every symbolic token for its lexicon vector. Out-of-lexicon tokens
// become zero vectors or raise, per the fallback policy. Labels and instance
// count are preserved.
inline std::vector<Instance> vectorize_cases(std::span<const Instance> cases,
                                             const VectorLexicon& lexicon,
                                             LexiconFallback fallback) {
  std::vector<Instance> out;
  out.reserve(cases.size());
  for (const Instance& inst : cases) {
    Instance mapped;
    mapped.label = inst.label;
    mapped.values.reserve(inst.values.size());
    for (const FeatureValue& v : inst.values) {
      if (!is_symbol(v)) {
        throw KindMismatchError("vectorize_cases needs symbolic instances");
      }
      const std::string token(std::get<Symbol>(v).text());
      auto it = lexicon.entries.find(token);
      if (it != lexicon.entries.end()) {
        mapped.values.emplace_back(it->second);
      } else if (fallback == LexiconFallback::Zero) {
        mapped.values.emplace_back(NumericVector(lexicon.dimension, 0.0));
      } else {
        throw MissingTokenError("token '" + token + "' not in lexicon",
                                token);
      }
    }
    out.push_back(std::move(mapped));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unknown-word POS case extraction
// ---------------------------------------------------------------------------

struct TaggedToken {
  std::string word;
  std::string tag;
};
using TaggedSentence = std::vector<TaggedToken>;

// Tagged corpus format: one "word tag" pair per line, blank line between
// sentences.
inline std::vector<TaggedSentence> read_tagged_corpus_stream(
    std::istream& in) {
  std::vector<TaggedSentence> sentences;
  TaggedSentence current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::vector<std::string> tokens =
        detail::tokenize_line(line, '\0', line_no);
    if (tokens.size() != 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       " needs exactly 'word tag'");
    }
    current.push_back(TaggedToken{std::move(tokens[0]), std::move(tokens[1])});
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  if (sentences.empty()) {
    throw EmptyFileError("no tagged sentences found");
  }
  return sentences;
}

inline std::vector<TaggedSentence> read_tagged_corpus(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open tagged corpus '" + path.string() + "'");
  }
  return read_tagged_corpus_stream(in);
}

// Word form -> set of possible tags.
using TagLexicon = std::map<std::string, std::set<std::string>>;

// Lexicon file format: "word tag1 tag2 ..." per line.
inline TagLexicon load_tag_lexicon_stream(std::istream& in) {
  TagLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    std::vector<std::string> tokens =
        detail::tokenize_line(line, '\0', line_no);
    if (tokens.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       " needs a word and at least one tag");
    }
    auto& tags = lexicon[tokens[0]];
    for (std::size_t i = 1; i < tokens.size(); ++i) tags.insert(tokens[i]);
  }
  if (lexicon.empty()) {
    throw EmptyFileError("no lexicon entries found");
  }
  return lexicon;
}

inline TagLexicon load_tag_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open tag lexicon '" + path.string() + "'");
  }
  return load_tag_lexicon_stream(in);
}

inline TagLexicon build_tag_lexicon(
    const std::vector<TaggedSentence>& sentences) {
  TagLexicon lexicon;
  for (const TaggedSentence& sentence : sentences) {
    for (const TaggedToken& token : sentence) {
      lexicon[token.word].insert(token.tag);
    }
  }
  return lexicon;
}

// A feature layout code over {p, d, a, s}: p = word-initial characters,
// d = tags of preceding words, a = ambiguity classes of following words,
// s = word-final characters. The code length is the output arity; repeated
// letters widen the window outward from the target.
struct FeatureTemplate {
  std::string code;

  explicit FeatureTemplate(std::string code_in) : code(std::move(code_in)) {
    if (code.empty()) {
      throw InvalidTemplateError("feature template is empty");
    }
    for (char c : code) {
      if (c != 'p' && c != 'd' && c != 'a' && c != 's') {
        throw InvalidTemplateError("feature template letter '" +
                                   std::string(1, c) +
                                   "' is not one of p, d, a, s");
      }
    }
  }

  std::size_t arity() const noexcept { return code.size(); }
};

// Penn-style open classes: nouns, verbs, adjectives, adverbs.
inline const std::set<std::string>& default_open_class_tags() {
  static const std::set<std::string> tags = {
      "NN", "NNS", "NNP", "NNPS", "VB",  "VBD", "VBG", "VBN",
      "VBP", "VBZ", "JJ",  "JJR",  "JJS", "RB",  "RBR", "RBS"};
  return tags;
}

inline constexpr const char* kBoundaryMarker = "_";
inline constexpr const char* kUnknownAmbiguityClass = "UNK";

namespace detail {

inline std::string ambiguity_class(const std::string& word,
                                   const TagLexicon& lexicon) {
  auto it = lexicon.find(word);
  if (it == lexicon.end() || it->second.empty()) {
    return kUnknownAmbiguityClass;
  }
  std::string joined;
  for (const std::string& tag : it->second) {  // set order: sorted
    if (!joined.empty()) joined += '-';
    joined += tag;
  }
  return joined;
}

}  // namespace detail

// Emits one case per open-class target word. Per template letter, the j-th
// occurrence (counting per letter, left to right) yields:
//   p: the j-th character of the word, "_" past the end;
//   d: the tag of the j-th word to the left, "_" outside the sentence;
//   a: the ambiguity class of the j-th word to the right ("_" outside);
//   s: the j-th character from the end (nearest-to-end first), "_" padded.
// The case label is the target's gold tag.
inline std::vector<Instance> extract_unknown_word_cases(
    const std::vector<TaggedSentence>& sentences,
    const FeatureTemplate& feature_template, const TagLexicon& lexicon_tags,
    const std::set<std::string>& open_class_tags = default_open_class_tags()) {
  std::vector<Instance> cases;
  for (const TaggedSentence& sentence : sentences) {
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      const TaggedToken& target = sentence[t];
      if (!open_class_tags.contains(target.tag)) continue;

      Instance inst;
      inst.values.reserve(feature_template.arity());
      std::size_t p_seen = 0, d_seen = 0, a_seen = 0, s_seen = 0;
      for (char letter : feature_template.code) {
        std::string value;
        switch (letter) {
          case 'p': {
            const std::size_t j = p_seen++;
            value = j < target.word.size()
                        ? std::string(1, target.word[j])
                        : kBoundaryMarker;
            break;
          }
          case 'd': {
            const std::size_t j = ++d_seen;
            value = t >= j ? sentence[t - j].tag : kBoundaryMarker;
            break;
          }
          case 'a': {
            const std::size_t j = ++a_seen;
            value = t + j < sentence.size()
                        ? detail::ambiguity_class(sentence[t + j].word,
                                                  lexicon_tags)
                        : kBoundaryMarker;
            break;
          }
          case 's': {
            const std::size_t j = ++s_seen;
            // Strictly inside the word: the first character belongs to the
            // p window, so a word of length n pads from s_n onwards.
            value = j < target.word.size()
                        ? std::string(1, target.word[target.word.size() - j])
                        : kBoundaryMarker;
            break;
          }
        }
        inst.values.emplace_back(Symbol(value));
      }
      inst.label = ClassLabel(target.tag);
      cases.push_back(std::move(inst));
    }
  }
  return cases;
}

}  // namespace mbsmooth
