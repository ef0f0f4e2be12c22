#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ospe/eval.hpp"

using namespace ospe;
using namespace ospe::eval;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

corpus::QuestionDataset dataset_of(const std::vector<std::pair<std::string, Label>>& answers) {
  std::vector<corpus::AnswerRecord> records;
  for (const auto& [text, label] : answers) records.push_back({"q", text, label});
  return corpus::build_question_dataset(records, "q");
}

// 20 correct answers all naming "alpha", 20 incorrect ones that never do.
corpus::QuestionDataset separable_corpus() {
  std::vector<std::pair<std::string, Label>> answers;
  for (int i = 0; i < 20; ++i) answers.push_back({"alpha filler" + std::to_string(i), Label::Correct});
  for (int i = 0; i < 20; ++i) answers.push_back({"beta filler" + std::to_string(i + 20), Label::Incorrect});
  return dataset_of(answers);
}

std::vector<ReportRow> table_rows() { return parse_report_csv(slurp(std::string(OSPE_FIXTURE_DIR) + "/question_table.csv")); }

}  // namespace

TEST_CASE("fold plans") {
  SUBCASE("even split") {
    const auto plan = make_folds(100, 10, 0);
    CHECK(plan.fold_sizes() == std::vector<std::size_t>(10, 10));
  }
  SUBCASE("remainder goes to the first folds") {
    const auto plan = make_folds(12, 10, 3);
    CHECK(plan.fold_sizes() == std::vector<std::size_t>{2, 2, 1, 1, 1, 1, 1, 1, 1, 1});
  }
  SUBCASE("every sample is assigned once and plans depend on the seed") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 2 + rng() % 9;
      const std::size_t n = k + rng() % 90;
      const auto a = make_folds(n, k, trial);
      CHECK(a.assignments.size() == n);
      CHECK(make_folds(n, k, trial).assignments == a.assignments);
      const auto sizes = a.fold_sizes();
      CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    }
    CHECK(make_folds(100, 10, 1).assignments != make_folds(100, 10, 2).assignments);
  }
  SUBCASE("stratified plans spread each class evenly") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 2 + rng() % 9;
      std::vector<Label> labels(k + rng() % 120);
      for (auto& l : labels) l = rng() % 3 ? Label::Correct : Label::Incorrect;
      const auto plan = make_folds(labels, k, trial);
      for (auto wanted : {Label::Correct, Label::Incorrect}) {
        std::vector<std::size_t> per_fold(k, 0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (labels[i] == wanted) ++per_fold[plan.assignments[i]];
        }
        CHECK(*std::max_element(per_fold.begin(), per_fold.end()) -
                  *std::min_element(per_fold.begin(), per_fold.end()) <=
              1);
      }
      const auto sizes = plan.fold_sizes();
      CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    }
  }
  CHECK_THROWS_AS(make_folds(5, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_folds(5, 1, 0), std::invalid_argument);
}

TEST_CASE("cross validation") {
  SUBCASE("separable corpus is graded perfectly") {
    const auto d = separable_corpus();
    const auto result = cross_validate(d, {}, make_folds(d, 10, 0));
    CHECK(result.accuracy == 1.0);
    CHECK(result.per_fold.size() == 10);
    CHECK(result.average_grade == 0.5);
  }
  SUBCASE("matches training and testing each fold by hand") {
    std::mt19937_64 rng(11);
    const char* vocab[] = {"mitral", "valve", "papillary", "muscles", "chordae", "atrial", "septum"};
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::pair<std::string, Label>> answers;
      const auto n = 12 + rng() % 30;
      for (std::size_t i = 0; i < n; ++i) {
        std::string text = "a" + std::to_string(i);
        for (const char* w : vocab) {
          if (rng() % 3 == 0) text += std::string(" ") + w;
        }
        answers.push_back({text, rng() % 2 ? Label::Correct : Label::Incorrect});
      }
      const auto d = dataset_of(answers);
      const auto plan = make_folds(d, 5, trial);
      const auto result = cross_validate(d, {}, plan);

      std::size_t hits = 0;
      for (std::size_t fold = 0; fold < 5; ++fold) {
        corpus::QuestionDataset train;
        train.question_id = "q";
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
          if (plan.assignments[i] == fold) continue;
          train.samples.push_back(d.samples[i]);
          (d.samples[i].label == Label::Correct ? train.correct_count : train.incorrect_count)++;
        }
        const auto tree = dtree::build_tree(train);
        std::size_t fold_hits = 0;
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
          if (plan.assignments[i] != fold) continue;
          // Unique tokens like "a7" never reach a held-out tree's vocabulary by
          // design, so this also exercises unseen words.
          if (dtree::classify(tree, d.samples[i].features).label == d.samples[i].label) ++fold_hits;
        }
        CHECK(result.per_fold[fold].correct_classifications == fold_hits);
        hits += fold_hits;
      }
      CHECK(result.accuracy == doctest::Approx(double(hits) / double(d.samples.size())));
    }
  }
  SUBCASE("pooled accuracy is the fold mean when folds are equal") {
    const auto d = separable_corpus();
    const auto result = cross_validate(d, {}, make_folds(d, 8, 4));
    double mean = 0;
    for (const auto& f : result.per_fold) {
      CHECK(f.test_size == 5);
      mean += double(f.correct_classifications) / double(f.test_size) / 8.0;
    }
    CHECK(result.accuracy == doctest::Approx(mean));
  }
  SUBCASE("too few samples") {
    const auto d = dataset_of({{"alpha", Label::Correct}, {"beta", Label::Incorrect}});
    CHECK_THROWS(cross_validate(d, {}, make_folds(40, 10, 0)));
    FoldPlan plan;
    plan.k = 10;
    plan.assignments = {0, 1};
    CHECK_THROWS_AS(cross_validate(d, {}, plan), std::invalid_argument);
  }
}

TEST_CASE("null baselines") {
  std::vector<std::pair<std::string, Label>> answers;
  for (int i = 0; i < 15; ++i) answers.push_back({"right" + std::to_string(i), Label::Correct});
  for (int i = 0; i < 5; ++i) answers.push_back({"wrong" + std::to_string(i), Label::Incorrect});
  const auto d = dataset_of(answers);
  CHECK(average_grade(d) == 0.75);
  CHECK(null_baseline(d, BaselineMode::AllCorrect) == 0.75);
  CHECK(null_baseline(d, BaselineMode::AllIncorrect) == 0.25);
  CHECK(null_baseline(d, BaselineMode::Majority) == 0.75);
  CHECK(null_baseline(0.3, BaselineMode::Majority) == doctest::Approx(0.7));
  for (int c = 0; c <= 200; ++c) {
    const double g = c / 200.0;
    CHECK(null_baseline(g, BaselineMode::AllCorrect) + null_baseline(g, BaselineMode::AllIncorrect) == 1.0);
  }
}

TEST_CASE("question ids sort naturally") {
  CHECK(question_id_less("Q2", "Q10"));
  CHECK_FALSE(question_id_less("Q10", "Q2"));
  CHECK(question_id_less("Q9", "Q10"));
  CHECK_FALSE(question_id_less("Q1", "Q1"));
  CHECK(question_id_less("A5", "B1"));
  std::vector<std::string> ids{"Q10", "Q1", "Q54", "Q2", "Q9"};
  std::sort(ids.begin(), ids.end(), question_id_less);
  CHECK(ids == std::vector<std::string>{"Q1", "Q2", "Q9", "Q10", "Q54"});
}

TEST_CASE("report over the per-question table") {
  const auto rows = table_rows();
  REQUIRE(rows.size() == 54);
  const auto report = build_report(rows);

  // Independent tallies straight from the rows.
  double sum = 0, mid_sum = 0;
  std::size_t mid = 0, below90 = 0, below80 = 0;
  for (const auto& r : rows) {
    sum += r.dt_accuracy;
    if (r.average_grade >= 0.4 && r.average_grade <= 0.6) {
      mid_sum += r.dt_accuracy;
      ++mid;
    }
    below90 += r.dt_accuracy < 0.9;
    below80 += r.dt_accuracy < 0.8;
  }
  CHECK(report.summary.questions == 54);
  CHECK(report.summary.mean_accuracy == doctest::Approx(sum / 54));
  CHECK(report.summary.mid_grade_questions == mid);
  CHECK(report.summary.mean_accuracy_mid_grade == doctest::Approx(mid_sum / double(mid)));
  CHECK(report.summary.below_90 == below90);
  CHECK(report.summary.below_80 == below80);
  CHECK(report.summary.below_90 == 7);
  CHECK(report.summary.below_80 == 2);

  REQUIRE(report.correlations.size() == 4);
  CHECK(report.correlations[0].premise == "average_grade");
  CHECK(report.correlations[0].result.r > 0);
  for (std::size_t i = 1; i < 4; ++i) CHECK(report.correlations[i].result.r < -0.5);

  SUBCASE("CSV round trip") {
    const auto csv = render_csv(report);
    CHECK(parse_report_csv(csv).size() == 54);
    CHECK(render_csv(build_report(parse_report_csv(csv))) == csv);
  }
  SUBCASE("text and JSON render") {
    CHECK(render_text(report).find("accuracy < 0.90: 7, < 0.80: 2") != std::string::npos);
    CHECK(render_json(report).find("\"questions_below_0_90\": 7") != std::string::npos);
  }
}

TEST_CASE("report edge cases") {
  SUBCASE("a single row has no correlations") {
    const auto report = build_report({ReportRow{"Q1", 0.5, 0.9, 10, 4, 6}});
    CHECK(report.summary.questions == 1);
    CHECK(report.correlations.empty());
    CHECK(report.summary.mean_accuracy_mid_grade == 0.9);
  }
  SUBCASE("constant column is skipped") {
    const auto report =
        build_report({ReportRow{"Q1", 0.5, 0.9, 10, 4, 6}, ReportRow{"Q2", 0.6, 0.8, 12, 4, 8},
                      ReportRow{"Q3", 0.7, 0.95, 9, 4, 5}});
    std::set<std::string> premises;
    for (const auto& c : report.correlations) premises.insert(c.premise);
    CHECK(premises == std::set<std::string>{"average_grade", "unique_all", "unique_incorrect"});
  }
  SUBCASE("mismatched inputs") {
    QuestionAccuracy a;
    a.question_id = "Q1";
    textprep::UniqueWordCounts wc{"Q2", 1, 1, 1};
    CHECK_THROWS_AS(build_report(std::span<const QuestionAccuracy>(&a, 1), std::span(&wc, 1)),
                    std::invalid_argument);
  }
  SUBCASE("bad CSV") {
    CHECK_THROWS(parse_report_csv("question_id,grade\nQ1,0.5\n"));
    CHECK_THROWS(parse_report_csv(
        "question_id,average_grade,dt_accuracy,unique_all,unique_correct,unique_incorrect\nQ1,x,0.9,1,1,1\n"));
  }
}

TEST_CASE("more overlapping vocabulary lowers accuracy") {
  // Questions whose correct and incorrect answers draw from increasingly
  // shared vocabularies. Accuracy should fall as unique words rise.
  std::vector<QuestionAccuracy> results;
  std::vector<textprep::UniqueWordCounts> counts;
  std::mt19937_64 rng(8);
  for (int q = 0; q < 12; ++q) {
    const int noise = q;  // number of random shared words per answer
    std::vector<corpus::AnswerRecord> records;
    const std::string id = "Q" + std::to_string(q + 1);
    for (int i = 0; i < 60; ++i) {
      const bool correct = i % 2 == 0;
      // A clean key word marks correctness except for the shared words.
      std::string text = correct && (rng() % 12) >= std::uint64_t(noise) ? "key" : "other";
      for (int w = 0; w < noise; ++w) text += " n" + std::to_string(rng() % (4 + 3 * q));
      text += " id" + std::to_string(i);
      records.push_back({id, text, correct ? Label::Correct : Label::Incorrect});
    }
    const auto d = corpus::build_question_dataset(records, id);
    results.push_back(cross_validate(d, {}, make_folds(d, 10, 0)));
    counts.push_back(textprep::unique_word_counts(d));
  }
  const auto report = build_report(results, counts);
  // Every question has grade 0.5, so that premise is skipped as constant.
  REQUIRE(report.correlations.size() == 3);
  CHECK(report.correlations[0].premise == "unique_all");
  CHECK(report.correlations[0].result.r < -0.5);
}
