#include "ospe/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ospe/csv.hpp"

namespace ospe::eval {

namespace {

using nlohmann::ordered_json;

// Draw in [0, bound) from the raw 64-bit engine output. std::uniform_int_distribution
// is implementation-defined, which would make fold plans differ between
// standard libraries.
std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

void shuffle(std::vector<std::size_t>& items, std::mt19937_64& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

void check_fold_args(std::size_t n_samples, std::size_t k) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (n_samples < k) {
    throw std::invalid_argument("need at least k=" + std::to_string(k) + " samples, have " +
                                std::to_string(n_samples));
  }
}

FoldPlan deal(const std::vector<std::size_t>& order, std::size_t k, std::uint64_t seed) {
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(order.size(), 0);
  for (std::size_t position = 0; position < order.size(); ++position) {
    plan.assignments[order[position]] = position % k;
  }
  return plan;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double parse_double(const std::string& field, std::size_t row, const char* column) {
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::invalid_argument("row " + std::to_string(row) + ": bad " + column + " '" + field + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& field, std::size_t row, const char* column) {
  std::size_t value = 0;
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::invalid_argument("row " + std::to_string(row) + ": bad " + column + " '" + field + "'");
  }
  return value;
}

}  // namespace

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto fold : assignments) ++sizes.at(fold);
  return sizes;
}

FoldPlan make_folds(std::size_t n_samples, std::size_t k, std::uint64_t seed) {
  check_fold_args(n_samples, k);
  std::vector<std::size_t> order(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
  std::mt19937_64 engine(seed);
  shuffle(order, engine);
  return deal(order, k, seed);
}

FoldPlan make_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  check_fold_args(labels.size(), k);
  std::vector<std::size_t> correct;
  std::vector<std::size_t> incorrect;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == Label::Correct ? correct : incorrect).push_back(i);
  }
  std::mt19937_64 engine(seed);
  shuffle(correct, engine);
  shuffle(incorrect, engine);
  correct.insert(correct.end(), incorrect.begin(), incorrect.end());
  return deal(correct, k, seed);
}

FoldPlan make_folds(const corpus::QuestionDataset& dataset, std::size_t k, std::uint64_t seed) {
  std::vector<Label> labels;
  labels.reserve(dataset.samples.size());
  for (const auto& sample : dataset.samples) labels.push_back(sample.label);
  return make_folds(labels, k, seed);
}

double average_grade(const corpus::QuestionDataset& dataset) {
  if (dataset.samples.empty()) throw std::invalid_argument("average grade of an empty dataset");
  return static_cast<double>(dataset.correct_count) / static_cast<double>(dataset.samples.size());
}

QuestionAccuracy cross_validate(const corpus::QuestionDataset& dataset, const dtree::TrainConfig& config,
                                const FoldPlan& plan) {
  if (plan.assignments.size() != dataset.samples.size()) {
    throw std::invalid_argument("fold plan covers " + std::to_string(plan.assignments.size()) +
                                " samples but the dataset has " + std::to_string(dataset.samples.size()));
  }
  check_fold_args(dataset.samples.size(), plan.k);

  QuestionAccuracy result;
  result.question_id = dataset.question_id;
  result.average_grade = average_grade(dataset);

  std::size_t total_correct = 0;
  std::size_t total_tested = 0;
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    corpus::QuestionDataset training;
    training.question_id = dataset.question_id;
    std::vector<std::size_t> held_out;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
      if (plan.assignments[i] == fold) {
        held_out.push_back(i);
        continue;
      }
      const auto& sample = dataset.samples[i];
      training.samples.push_back(sample);
      (sample.label == Label::Correct ? training.correct_count : training.incorrect_count)++;
    }
    if (training.samples.empty()) {
      throw FoldError(fold, "fold " + std::to_string(fold) + " leaves no training samples");
    }

    const auto tree = dtree::build_tree(training, config);
    FoldResult fold_result;
    fold_result.test_size = held_out.size();
    for (auto i : held_out) {
      const auto& sample = dataset.samples[i];
      if (dtree::classify(tree, sample.features).label == sample.label) ++fold_result.correct_classifications;
    }
    total_correct += fold_result.correct_classifications;
    total_tested += fold_result.test_size;
    result.per_fold.push_back(fold_result);
  }
  result.accuracy = static_cast<double>(total_correct) / static_cast<double>(total_tested);
  return result;
}

double null_baseline(double grade, BaselineMode mode) {
  switch (mode) {
    case BaselineMode::AllCorrect:
      return grade;
    case BaselineMode::AllIncorrect:
      return 1.0 - grade;
    case BaselineMode::Majority:
      return std::max(grade, 1.0 - grade);
  }
  return grade;
}

double null_baseline(const corpus::QuestionDataset& dataset, BaselineMode mode) {
  return null_baseline(average_grade(dataset), mode);
}

bool question_id_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      auto da = a.substr(i, ie - i);
      auto db = b.substr(j, je - j);
      while (da.size() > 1 && da.front() == '0') da.remove_prefix(1);
      while (db.size() > 1 && db.front() == '0') db.remove_prefix(1);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

ReportSummary summarize(std::span<const ReportRow> rows) {
  ReportSummary summary;
  summary.questions = rows.size();
  std::vector<double> accuracies;
  std::vector<double> mid;
  std::vector<double> baselines;
  for (const auto& row : rows) {
    accuracies.push_back(row.dt_accuracy);
    baselines.push_back(null_baseline(row.average_grade, BaselineMode::Majority));
    if (row.average_grade >= kMidGradeLow && row.average_grade <= kMidGradeHigh) mid.push_back(row.dt_accuracy);
    if (row.dt_accuracy < 0.90) ++summary.below_90;
    if (row.dt_accuracy < 0.80) ++summary.below_80;
  }
  summary.mean_accuracy = mean(accuracies);
  summary.mean_accuracy_mid_grade = mean(mid);
  summary.mid_grade_questions = mid.size();
  summary.mean_majority_baseline = mean(baselines);
  return summary;
}

std::vector<NamedCorrelation> correlate(std::span<const ReportRow> rows) {
  std::vector<NamedCorrelation> out;
  if (rows.size() < 3) return out;
  std::vector<double> accuracy, grade, all, correct, incorrect;
  for (const auto& row : rows) {
    accuracy.push_back(row.dt_accuracy);
    grade.push_back(row.average_grade);
    all.push_back(static_cast<double>(row.unique_all));
    correct.push_back(static_cast<double>(row.unique_correct));
    incorrect.push_back(static_cast<double>(row.unique_incorrect));
  }
  const std::pair<const char*, const std::vector<double>*> premises[] = {
      {"average_grade", &grade},
      {"unique_all", &all},
      {"unique_correct", &correct},
      {"unique_incorrect", &incorrect},
  };
  for (const auto& [name, series] : premises) {
    try {
      out.push_back({name, stats::pearson(accuracy, *series)});
    } catch (const std::invalid_argument&) {
      // Constant column: the coefficient is undefined, leave it out.
    }
  }
  return out;
}

EvaluationReport build_report(std::vector<ReportRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return question_id_less(a.question_id, b.question_id); });
  EvaluationReport report;
  report.summary = summarize(rows);
  report.correlations = correlate(rows);
  report.rows = std::move(rows);
  return report;
}

EvaluationReport build_report(std::span<const QuestionAccuracy> results,
                              std::span<const textprep::UniqueWordCounts> word_counts) {
  std::map<std::string, const textprep::UniqueWordCounts*> counts;
  for (const auto& c : word_counts) {
    if (!counts.emplace(c.question_id, &c).second) {
      throw std::invalid_argument("duplicate word counts for question " + c.question_id);
    }
  }
  if (counts.size() != results.size()) {
    throw std::invalid_argument("accuracy results and word counts cover different questions");
  }
  std::vector<ReportRow> rows;
  for (const auto& result : results) {
    const auto it = counts.find(result.question_id);
    if (it == counts.end()) {
      throw std::invalid_argument("no word counts for question " + result.question_id);
    }
    rows.push_back({result.question_id, result.average_grade, result.accuracy, it->second->all,
                    it->second->correct_only, it->second->incorrect_only});
    counts.erase(it);
  }
  return build_report(std::move(rows));
}

std::string render_csv(const EvaluationReport& report) {
  std::string out = "question_id,average_grade,dt_accuracy,unique_all,unique_correct,unique_incorrect\n";
  for (const auto& row : report.rows) {
    out += csv::format_row({row.question_id, format_double(row.average_grade), format_double(row.dt_accuracy),
                            std::to_string(row.unique_all), std::to_string(row.unique_correct),
                            std::to_string(row.unique_incorrect)});
  }
  return out;
}

std::string render_json(const EvaluationReport& report) {
  ordered_json document;
  document["rows"] = ordered_json::array();
  for (const auto& row : report.rows) {
    document["rows"].push_back({{"question_id", row.question_id},
                                {"average_grade", row.average_grade},
                                {"dt_accuracy", row.dt_accuracy},
                                {"unique_all", row.unique_all},
                                {"unique_correct", row.unique_correct},
                                {"unique_incorrect", row.unique_incorrect}});
  }
  const auto& s = report.summary;
  document["summary"] = {{"questions", s.questions},
                         {"mean_accuracy", s.mean_accuracy},
                         {"mid_grade_band", {kMidGradeLow, kMidGradeHigh}},
                         {"mid_grade_questions", s.mid_grade_questions},
                         {"mean_accuracy_mid_grade", s.mean_accuracy_mid_grade},
                         {"questions_below_0_90", s.below_90},
                         {"questions_below_0_80", s.below_80},
                         {"mean_majority_baseline", s.mean_majority_baseline}};
  document["correlations"] = ordered_json::array();
  for (const auto& c : report.correlations) {
    document["correlations"].push_back(
        {{"premise", c.premise}, {"r", c.result.r}, {"p", c.result.p}, {"n", c.result.n}});
  }
  return document.dump(2) + "\n";
}

std::string render_text(const EvaluationReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %8s %8s %6s %8s %10s\n", "question", "grade", "accuracy", "all",
                "correct", "incorrect");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof line, "%-12s %8.3f %8.3f %6zu %8zu %10zu\n", row.question_id.c_str(),
                  row.average_grade, row.dt_accuracy, row.unique_all, row.unique_correct, row.unique_incorrect);
    out << line;
  }
  const auto& s = report.summary;
  std::snprintf(line, sizeof line, "\nmean accuracy %.4f over %zu questions (majority baseline %.4f)\n",
                s.mean_accuracy, s.questions, s.mean_majority_baseline);
  out << line;
  std::snprintf(line, sizeof line, "grade in [%.2f, %.2f]: mean accuracy %.4f over %zu questions\n", kMidGradeLow,
                kMidGradeHigh, s.mean_accuracy_mid_grade, s.mid_grade_questions);
  out << line;
  std::snprintf(line, sizeof line, "accuracy < 0.90: %zu, < 0.80: %zu\n", s.below_90, s.below_80);
  out << line;
  for (const auto& c : report.correlations) {
    std::snprintf(line, sizeof line, "accuracy vs %-16s r = %+.4f  p = %.3g  (n = %zu)\n", c.premise.c_str(),
                  c.result.r, c.result.p, c.result.n);
    out << line;
  }
  return out.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view content) {
  const auto table = csv::parse(content);
  if (table.empty()) throw std::invalid_argument("report CSV is empty");
  const csv::Row expected = {"question_id", "average_grade", "dt_accuracy",
                             "unique_all",  "unique_correct", "unique_incorrect"};
  if (table.front() != expected) {
    throw std::invalid_argument(
        "report CSV header must be question_id,average_grade,dt_accuracy,unique_all,unique_correct,unique_incorrect");
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& r = table[i];
    if (r.size() != expected.size()) {
      throw std::invalid_argument("row " + std::to_string(i) + ": expected 6 columns");
    }
    ReportRow row;
    row.question_id = r[0];
    row.average_grade = parse_double(r[1], i, "average_grade");
    row.dt_accuracy = parse_double(r[2], i, "dt_accuracy");
    row.unique_all = parse_count(r[3], i, "unique_all");
    row.unique_correct = parse_count(r[4], i, "unique_correct");
    row.unique_incorrect = parse_count(r[5], i, "unique_incorrect");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ospe::eval
