#pragma once

#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ospe::corpus {
struct QuestionDataset;
}

namespace ospe::textprep {

using WordSet = std::set<std::string, std::less<>>;

/// The 31 common English words dropped before features are extracted.
const WordSet& default_stopwords();

struct PreprocessConfig {
  WordSet stopwords = default_stopwords();
  bool lowercase = true;
};

/// Lowercases ASCII letters (when configured) and splits on every maximal run
/// of characters that are not ASCII letters or digits. Bytes >= 0x80 count as
/// word characters so UTF-8 letters stay inside their token.
std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config = {});

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const PreprocessConfig& config = {});

WordSet feature_set(std::span<const std::string> tokens);

/// tokenize + remove_stopwords + feature_set.
WordSet extract_features(std::string_view text, const PreprocessConfig& config = {});

/// One word per line, `#` starts a comment, blank lines ignored. Entries are
/// lowercased to match tokenizer output.
WordSet parse_stopword_file(std::istream& in);
WordSet load_stopword_file(const std::string& path);

struct UniqueWordCounts {
  std::string question_id;
  std::size_t all = 0;
  std::size_t correct_only = 0;
  std::size_t incorrect_only = 0;

  bool operator==(const UniqueWordCounts&) const = default;
};

// The per-class columns count every word seen in that class, so a word shared
// by both classes is counted in both.
UniqueWordCounts unique_word_counts(const corpus::QuestionDataset& dataset);

}  // namespace ospe::textprep
