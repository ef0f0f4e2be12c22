#include "ospe/textprep.hpp"

#include <fstream>
#include <istream>
#include <stdexcept>

#include "ospe/corpus.hpp"

namespace ospe::textprep {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

const WordSet& default_stopwords() {
  static const WordSet words = {
      "a",  "an", "and",  "are",  "as",   "at",   "be",   "but", "by", "did", "for",
      "had", "has", "have", "i",   "in",   "is",   "it",   "of",  "on", "or",  "so",
      "than", "that", "the", "then", "they", "this", "to", "was", "with",
  };
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_word_byte(static_cast<unsigned char>(c))) {
      current.push_back(config.lowercase ? ascii_lower(c) : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const PreprocessConfig& config) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!config.stopwords.contains(token)) kept.push_back(token);
  }
  return kept;
}

WordSet feature_set(std::span<const std::string> tokens) {
  return WordSet(tokens.begin(), tokens.end());
}

WordSet extract_features(std::string_view text, const PreprocessConfig& config) {
  const auto tokens = tokenize(text, config);
  return feature_set(remove_stopwords(tokens, config));
}

WordSet parse_stopword_file(std::istream& in) {
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    std::string word(view);
    for (auto& c : word) c = ascii_lower(c);
    words.insert(std::move(word));
  }
  return words;
}

WordSet load_stopword_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  return parse_stopword_file(in);
}

UniqueWordCounts unique_word_counts(const corpus::QuestionDataset& dataset) {
  WordSet all;
  WordSet correct;
  WordSet incorrect;
  for (const auto& sample : dataset.samples) {
    all.insert(sample.features.begin(), sample.features.end());
    auto& bucket = sample.label == Label::Correct ? correct : incorrect;
    bucket.insert(sample.features.begin(), sample.features.end());
  }
  return {dataset.question_id, all.size(), correct.size(), incorrect.size()};
}

}  // namespace ospe::textprep
