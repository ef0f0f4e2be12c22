#include <doctest.h>

#include <random>
#include <sstream>

#include "ospe/corpus.hpp"
#include "ospe/textprep.hpp"

using namespace ospe;
using namespace ospe::textprep;
using Tokens = std::vector<std::string>;

TEST_CASE("default stopword list is the 31 common words") {
  const auto& words = default_stopwords();
  CHECK(words.size() == 31);
  for (const char* w : {"a", "an", "and", "are", "as", "at", "be", "but", "by", "did", "for", "had", "has", "have",
                        "i", "in", "is", "it", "of", "on", "or", "so", "than", "that", "the", "then", "they", "this",
                        "to", "was", "with"}) {
    CHECK_MESSAGE(words.contains(w), w);
  }
  CHECK_FALSE(words.contains("I"));
}

TEST_CASE("tokenize") {
  CHECK(tokenize("Papillary Muscles") == Tokens{"papillary", "muscles"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("keep av valves closed") == Tokens{"keep", "av", "valves", "closed"});
  CHECK(tokenize("  T4/T5 -- inter-ventricular, (septum)!") == Tokens{"t4", "t5", "inter", "ventricular", "septum"});
  CHECK(tokenize("...,;").empty());

  SUBCASE("misspellings and UTF-8 letters survive") {
    CHECK(tokenize("papilary mucsles") == Tokens{"papilary", "mucsles"});
    CHECK(tokenize("Cr\xC3\xA8me br\xC3\xBBl\xC3\xA9" "e") == Tokens{"cr\xC3\xA8me", "br\xC3\xBBl\xC3\xA9" "e"});
  }
  SUBCASE("case is kept when lowercasing is off") {
    PreprocessConfig config;
    config.lowercase = false;
    CHECK(tokenize("Papillary Muscles", config) == Tokens{"Papillary", "Muscles"});
  }
}

TEST_CASE("remove_stopwords") {
  CHECK(remove_stopwords(Tokens{"the", "papillary", "muscle"}) == Tokens{"papillary", "muscle"});
  CHECK(remove_stopwords(Tokens{"a", "an", "of"}).empty());
  CHECK(remove_stopwords(Tokens{"subvalvular", "apparatus"}) == Tokens{"subvalvular", "apparatus"});
  CHECK(remove_stopwords(Tokens{"i", "think", "it", "is", "the", "aorta"}) == Tokens{"think", "aorta"});
}

TEST_CASE("feature_set") {
  CHECK(feature_set(Tokens{"valve", "valve", "mitral"}) == WordSet{"valve", "mitral"});
  CHECK(feature_set(Tokens{}).empty());
  CHECK(feature_set(Tokens{"papillary", "muscles"}) == WordSet{"papillary", "muscles"});
  CHECK(extract_features("The mitral VALVE, the valve") == WordSet{"mitral", "valve"});
}

TEST_CASE("stopword override file") {
  std::istringstream in("# anatomy fillers\nleft\n  Right  \n\nside # trailing comment\n");
  CHECK(parse_stopword_file(in) == WordSet{"left", "right", "side"});
  CHECK_THROWS(load_stopword_file("/nonexistent/stopwords.txt"));

  PreprocessConfig config;
  config.stopwords = WordSet{"left"};
  CHECK(extract_features("the left ventricle", config) == WordSet{"the", "ventricle"});
}

namespace {

corpus::QuestionDataset dataset_of(std::vector<std::pair<WordSet, Label>> items) {
  corpus::QuestionDataset d;
  d.question_id = "q";
  int n = 0;
  for (auto& [features, label] : items) {
    (label == Label::Correct ? d.correct_count : d.incorrect_count)++;
    d.samples.push_back({features, "answer " + std::to_string(n++), label});
  }
  return d;
}

}  // namespace

TEST_CASE("unique_word_counts") {
  CHECK(unique_word_counts(dataset_of({})) == UniqueWordCounts{"q", 0, 0, 0});
  CHECK(unique_word_counts(dataset_of({{{"papillary", "muscles"}, Label::Correct},
                                       {{"atrial", "muscles"}, Label::Incorrect}})) ==
        UniqueWordCounts{"q", 3, 2, 2});
  CHECK(unique_word_counts(dataset_of({{{"x"}, Label::Correct}, {{"y"}, Label::Correct}})) ==
        UniqueWordCounts{"q", 2, 2, 0});
}

TEST_CASE("preprocessing properties on random text") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcXYZ019 ,.-/'()\t";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto length = rng() % 40;
    for (std::size_t i = 0; i < length; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    // Salt with stopwords so removal has something to do.
    if (trial % 3 == 0) text += " the of A ";

    const auto tokens = tokenize(text);
    std::string joined;
    for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
    CHECK(tokenize(joined) == tokens);

    const auto once = remove_stopwords(tokens);
    CHECK(remove_stopwords(once) == once);
    CHECK(once.size() <= tokens.size());
    CHECK(feature_set(once).size() <= once.size());
  }
}

TEST_CASE("unique word bounds hold on random datasets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<WordSet, Label>> items;
    const auto n = rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
      WordSet words;
      const auto m = rng() % 4;
      for (std::size_t j = 0; j < m; ++j) words.insert("w" + std::to_string(rng() % 8));
      items.push_back({words, rng() % 2 ? Label::Correct : Label::Incorrect});
    }
    const auto counts = unique_word_counts(dataset_of(items));
    CHECK(std::max(counts.correct_only, counts.incorrect_only) <= counts.all);
    CHECK(counts.all <= counts.correct_only + counts.incorrect_only);
  }
}
