#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include "ospe/label.hpp"
#include "ospe/textprep.hpp"

namespace ospe::corpus {

struct AnswerRecord {
  std::string question_id;
  std::string raw_text;  // verbatim, misspellings preserved
  Label label = Label::Incorrect;

  bool operator==(const AnswerRecord&) const = default;
};

/// An answer submitted for grading; no expert label.
struct UngradedAnswer {
  std::string question_id;
  std::string raw_text;
};

enum class FileFormat { Csv, Json };

/// Raised for malformed answer files. `row` is the 1-based data row (CSV,
/// header excluded) or element (JSON).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

std::vector<AnswerRecord> parse_answer_file(std::string_view content, FileFormat format);

/// Same layouts as parse_answer_file, but the `label` column/key is optional
/// and ignored when present.
std::vector<UngradedAnswer> parse_ungraded_file(std::string_view content, FileFormat format);

std::string write_answer_csv(std::span<const AnswerRecord> records);
std::string write_answer_json(std::span<const AnswerRecord> records);

/// Picks the format from the file extension (.json, anything else is CSV).
FileFormat format_for_path(std::string_view path);

struct Sample {
  textprep::WordSet features;
  std::string raw_text;
  Label label = Label::Incorrect;

  bool operator==(const Sample&) const = default;
};

struct QuestionDataset {
  std::string question_id;
  std::vector<Sample> samples;
  std::size_t correct_count = 0;
  std::size_t incorrect_count = 0;

  std::size_t size() const { return samples.size(); }
  bool operator==(const QuestionDataset&) const = default;
};

struct LabelConflict {
  std::string raw_text;
  bool operator==(const LabelConflict&) const = default;
};

struct ValidationReport {
  std::string question_id;
  std::vector<LabelConflict> conflicts;            // texts seen with both labels
  std::vector<std::string> empty_after_preprocessing;
  std::size_t sample_count = 0;                    // unique non-blank texts

  bool clean() const { return conflicts.empty() && empty_after_preprocessing.empty(); }
};

std::string render(const ValidationReport& report);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Whitespace-only or empty after trimming.
bool is_blank(std::string_view text);

/// Drops blanks, collapses exact duplicate raw text, and extracts features.
/// Records for other questions are ignored. Throws DatasetError on label
/// conflicts or when nothing survives filtering.
QuestionDataset build_question_dataset(std::span<const AnswerRecord> records,
                                       std::string_view question_id,
                                       const textprep::PreprocessConfig& prep = {});

ValidationReport validate_dataset(std::span<const AnswerRecord> records,
                                  const textprep::PreprocessConfig& prep = {});

/// Distinct question ids in first-seen order.
std::vector<std::string> question_ids(std::span<const AnswerRecord> records);

}  // namespace ospe::corpus
