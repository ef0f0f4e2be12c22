#include "ospe/corpus.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ospe/csv.hpp"

namespace ospe::corpus {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

struct RawRow {
  std::string question_id;
  std::string answer;
  std::optional<std::string> label;
};

struct ColumnMap {
  std::size_t question_id;
  std::size_t answer;
  std::optional<std::size_t> label;
  std::size_t width;
};

ColumnMap map_header(const csv::Row& header, bool label_required) {
  std::optional<std::size_t> qid;
  std::optional<std::size_t> answer;
  std::optional<std::size_t> label;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = trim(header[i]);
    if (name == "question_id") qid = i;
    else if (name == "answer") answer = i;
    else if (name == "label") label = i;
    else throw ParseError(0, "unknown column in header: '" + header[i] + "'");
  }
  if (!qid || !answer || (label_required && !label)) {
    throw ParseError(0, label_required ? "header must be question_id,answer,label"
                                       : "header must contain question_id and answer");
  }
  return {*qid, *answer, label, header.size()};
}

std::vector<RawRow> read_csv_rows(std::string_view content, bool label_required) {
  std::vector<csv::Row> table;
  try {
    table = csv::parse(content);
  } catch (const csv::CsvError& e) {
    throw ParseError(0, e.what());
  }
  if (table.empty()) throw ParseError(0, "missing header row");
  const auto columns = map_header(table.front(), label_required);

  std::vector<RawRow> rows;
  rows.reserve(table.size() - 1);
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.size() != columns.width) {
      throw ParseError(i, "row " + std::to_string(i) + ": expected " + std::to_string(columns.width) +
                              " columns, found " + std::to_string(row.size()));
    }
    RawRow raw{row[columns.question_id], row[columns.answer], std::nullopt};
    if (columns.label) raw.label = row[*columns.label];
    rows.push_back(std::move(raw));
  }
  return rows;
}

std::string string_member(const json& element, const char* key, std::size_t index) {
  const auto it = element.find(key);
  if (it == element.end()) {
    throw ParseError(index, "element " + std::to_string(index) + ": missing key '" + key + "'");
  }
  if (!it->is_string()) {
    throw ParseError(index, "element " + std::to_string(index) + ": '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<RawRow> read_json_rows(std::string_view content, bool label_required) {
  json document;
  try {
    document = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  if (!document.is_array()) throw ParseError(0, "answer JSON must be an array of objects");

  std::vector<RawRow> rows;
  rows.reserve(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) {
    const auto& element = document[i];
    const std::size_t index = i + 1;
    if (!element.is_object()) {
      throw ParseError(index, "element " + std::to_string(index) + ": expected an object");
    }
    RawRow raw{string_member(element, "question_id", index), string_member(element, "answer", index),
               std::nullopt};
    if (label_required || element.contains("label")) {
      const auto it = element.find("label");
      if (it != element.end() && it->is_number_integer()) {
        raw.label = std::to_string(it->get<long long>());
      } else {
        raw.label = string_member(element, "label", index);
      }
    }
    rows.push_back(std::move(raw));
  }
  return rows;
}

std::vector<RawRow> read_rows(std::string_view content, FileFormat format, bool label_required) {
  return format == FileFormat::Csv ? read_csv_rows(content, label_required)
                                   : read_json_rows(content, label_required);
}

}  // namespace

std::vector<AnswerRecord> parse_answer_file(std::string_view content, FileFormat format) {
  auto rows = read_rows(content, format, true);
  std::vector<AnswerRecord> records;
  records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const std::size_t index = i + 1;
    if (trim(row.question_id).empty()) {
      throw ParseError(index, "row " + std::to_string(index) + ": empty question_id");
    }
    const auto label = parse_label(trim(*row.label));
    if (!label) {
      throw ParseError(index, "row " + std::to_string(index) + ": unknown label '" + *row.label + "'");
    }
    records.push_back({std::move(row.question_id), std::move(row.answer), *label});
  }
  return records;
}

std::vector<UngradedAnswer> parse_ungraded_file(std::string_view content, FileFormat format) {
  auto rows = read_rows(content, format, false);
  std::vector<UngradedAnswer> answers;
  answers.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (trim(rows[i].question_id).empty()) {
      throw ParseError(i + 1, "row " + std::to_string(i + 1) + ": empty question_id");
    }
    answers.push_back({std::move(rows[i].question_id), std::move(rows[i].answer)});
  }
  return answers;
}

std::string write_answer_csv(std::span<const AnswerRecord> records) {
  std::string out = "question_id,answer,label\n";
  for (const auto& record : records) {
    out += csv::format_row({record.question_id, record.raw_text, std::string(to_string(record.label))});
  }
  return out;
}

std::string write_answer_json(std::span<const AnswerRecord> records) {
  json document = json::array();
  for (const auto& record : records) {
    document.push_back({{"question_id", record.question_id},
                        {"answer", record.raw_text},
                        {"label", to_string(record.label)}});
  }
  return document.dump(2) + "\n";
}

FileFormat format_for_path(std::string_view path) {
  return path.ends_with(".json") || path.ends_with(".JSON") ? FileFormat::Json : FileFormat::Csv;
}

bool is_blank(std::string_view text) { return trim(text).empty(); }

std::vector<std::string> question_ids(std::span<const AnswerRecord> records) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& record : records) {
    if (seen.insert(record.question_id).second) ids.push_back(record.question_id);
  }
  return ids;
}

ValidationReport validate_dataset(std::span<const AnswerRecord> records,
                                  const textprep::PreprocessConfig& prep) {
  ValidationReport report;
  if (!records.empty()) report.question_id = records.front().question_id;

  struct Seen {
    bool correct = false;
    bool incorrect = false;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Seen> seen;
  for (const auto& record : records) {
    if (is_blank(record.raw_text)) continue;
    auto [it, inserted] = seen.try_emplace(record.raw_text);
    if (inserted) order.push_back(record.raw_text);
    (record.label == Label::Correct ? it->second.correct : it->second.incorrect) = true;
  }

  report.sample_count = order.size();
  for (const auto& text : order) {
    const auto& flags = seen.at(text);
    if (flags.correct && flags.incorrect) report.conflicts.push_back({text});
    if (textprep::extract_features(text, prep).empty()) report.empty_after_preprocessing.push_back(text);
  }
  return report;
}

std::string render(const ValidationReport& report) {
  std::ostringstream out;
  out << "question " << report.question_id << ": " << report.sample_count << " unique non-blank answers\n";
  for (const auto& conflict : report.conflicts) {
    out << "  conflict: \"" << conflict.raw_text << "\" is labelled both correct and incorrect\n";
  }
  for (const auto& text : report.empty_after_preprocessing) {
    out << "  warning: \"" << text << "\" has no words left after stopword removal\n";
  }
  return out.str();
}

QuestionDataset build_question_dataset(std::span<const AnswerRecord> records,
                                       std::string_view question_id,
                                       const textprep::PreprocessConfig& prep) {
  std::vector<AnswerRecord> selected;
  for (const auto& record : records) {
    if (record.question_id == question_id) selected.push_back(record);
  }

  auto report = validate_dataset(selected, prep);
  report.question_id = std::string(question_id);
  if (!report.conflicts.empty()) {
    throw DatasetError("question " + report.question_id + ": " + std::to_string(report.conflicts.size()) +
                           " answer(s) carry conflicting labels",
                       std::move(report));
  }

  QuestionDataset dataset;
  dataset.question_id = std::string(question_id);
  std::unordered_set<std::string> seen;
  for (auto& record : selected) {
    if (is_blank(record.raw_text) || !seen.insert(record.raw_text).second) continue;
    auto features = textprep::extract_features(record.raw_text, prep);
    (record.label == Label::Correct ? dataset.correct_count : dataset.incorrect_count)++;
    dataset.samples.push_back({std::move(features), std::move(record.raw_text), record.label});
  }
  if (dataset.samples.empty()) {
    throw DatasetError("question " + dataset.question_id + ": no non-blank answers", std::move(report));
  }
  return dataset;
}

}  // namespace ospe::corpus
