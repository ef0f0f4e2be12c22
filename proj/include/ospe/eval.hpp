#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ospe/corpus.hpp"
#include "ospe/dtree.hpp"
#include "ospe/stats.hpp"
#include "ospe/textprep.hpp"

namespace ospe::eval {

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // sample index -> fold

  std::vector<std::size_t> fold_sizes() const;
};

/// Unstratified plan: seeded permutation, then round-robin over folds.
FoldPlan make_folds(std::size_t n_samples, std::size_t k, std::uint64_t seed);

/// Stratified plan: each class is permuted separately and the classes are
/// dealt round-robin one after the other, so every fold gets a proportional
/// share of each label and fold sizes still differ by at most one.
FoldPlan make_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

FoldPlan make_folds(const corpus::QuestionDataset& dataset, std::size_t k, std::uint64_t seed);

struct FoldResult {
  std::size_t correct_classifications = 0;
  std::size_t test_size = 0;
};

struct QuestionAccuracy {
  std::string question_id;
  double accuracy = 0.0;  // pooled over folds
  std::vector<FoldResult> per_fold;
  double average_grade = 0.0;
};

class FoldError : public std::runtime_error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : std::runtime_error(what), fold_(fold) {}
  std::size_t fold() const { return fold_; }

 private:
  std::size_t fold_;
};

QuestionAccuracy cross_validate(const corpus::QuestionDataset& dataset,
                                const dtree::TrainConfig& config,
                                const FoldPlan& plan);

double average_grade(const corpus::QuestionDataset& dataset);

enum class BaselineMode { AllCorrect, AllIncorrect, Majority };

/// Accuracy of labelling every answer the same way.
double null_baseline(const corpus::QuestionDataset& dataset, BaselineMode mode);
double null_baseline(double average_grade, BaselineMode mode);

struct ReportRow {
  std::string question_id;
  double average_grade = 0.0;
  double dt_accuracy = 0.0;
  std::size_t unique_all = 0;
  std::size_t unique_correct = 0;
  std::size_t unique_incorrect = 0;
};

struct ReportSummary {
  std::size_t questions = 0;
  double mean_accuracy = 0.0;
  double mean_accuracy_mid_grade = 0.0;  // grade in [0.40, 0.60]
  std::size_t mid_grade_questions = 0;
  std::size_t below_90 = 0;
  std::size_t below_80 = 0;
  double mean_majority_baseline = 0.0;
};

struct NamedCorrelation {
  std::string premise;
  stats::CorrelationResult result;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;  // sorted by question id
  ReportSummary summary;
  std::vector<NamedCorrelation> correlations;
};

inline constexpr double kMidGradeLow = 0.40;
inline constexpr double kMidGradeHigh = 0.60;

/// Orders question ids so that "Q2" sorts before "Q10".
bool question_id_less(std::string_view a, std::string_view b);

ReportSummary summarize(std::span<const ReportRow> rows);

/// Accuracy against average grade and each unique-word column. Needs at least
/// three rows; fewer leaves the list empty.
std::vector<NamedCorrelation> correlate(std::span<const ReportRow> rows);

/// Throws std::invalid_argument if the two inputs cover different questions.
EvaluationReport build_report(std::span<const QuestionAccuracy> results,
                              std::span<const textprep::UniqueWordCounts> word_counts);

/// Summary and correlations from rows that are already known (e.g. the
/// per-question table shipped in fixtures/).
EvaluationReport build_report(std::vector<ReportRow> rows);

/// question_id,average_grade,dt_accuracy,unique_all,unique_correct,unique_incorrect
std::string render_csv(const EvaluationReport& report);
std::string render_json(const EvaluationReport& report);
std::string render_text(const EvaluationReport& report);

/// Reads rows in the render_csv layout.
std::vector<ReportRow> parse_report_csv(std::string_view content);

}  // namespace ospe::eval
