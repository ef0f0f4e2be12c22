#include "ospe/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ospe/corpus.hpp"
#include "ospe/csv.hpp"
#include "ospe/dtree.hpp"
#include "ospe/eval.hpp"
#include "ospe/textprep.hpp"
#include "ospe/tree_io.hpp"

namespace ospe::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTreeSuffix = ".tree.json";

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

textprep::PreprocessConfig preprocess_config(const std::optional<std::string>& stopwords) {
  textprep::PreprocessConfig config;
  if (stopwords) config.stopwords = textprep::load_stopword_file(*stopwords);
  return config;
}

std::vector<corpus::AnswerRecord> load_answers(const std::string& path) {
  return corpus::parse_answer_file(read_file(path), corpus::format_for_path(path));
}

struct BuiltDatasets {
  std::vector<corpus::QuestionDataset> datasets;
  std::vector<corpus::ValidationReport> failures;
};

// Every question is validated before any fails the run, so one invocation
// reports all conflicts at once.
BuiltDatasets build_all(const std::vector<corpus::AnswerRecord>& records, const textprep::PreprocessConfig& prep,
                        std::ostream& err) {
  std::map<std::string, std::vector<corpus::AnswerRecord>> grouped;
  for (const auto& record : records) grouped[record.question_id].push_back(record);

  BuiltDatasets built;
  for (const auto& qid : corpus::question_ids(records)) {
    const auto& group = grouped.at(qid);
    try {
      built.datasets.push_back(corpus::build_question_dataset(group, qid, prep));
      auto report = corpus::validate_dataset(group, prep);
      if (!report.empty_after_preprocessing.empty()) err << corpus::render(report);
    } catch (const corpus::DatasetError& e) {
      err << "error: " << e.what() << "\n" << corpus::render(e.report());
      built.failures.push_back(e.report());
    }
  }
  return built;
}

template <typename Result, typename Fn>
std::vector<Result> parallel_map(const std::vector<corpus::QuestionDataset>& datasets, Fn fn) {
  std::vector<std::future<Result>> futures;
  futures.reserve(datasets.size());
  for (const auto& dataset : datasets) {
    futures.push_back(std::async(std::launch::async, [&fn, &dataset] { return fn(dataset); }));
  }
  std::vector<Result> results;
  results.reserve(futures.size());
  for (auto& future : futures) results.push_back(future.get());
  return results;
}

std::map<std::string, dtree::DecisionTree> load_trees(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("trees directory not found: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(kTreeSuffix)) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::map<std::string, dtree::DecisionTree> trees;
  for (const auto& path : paths) {
    dtree::DecisionTree tree;
    try {
      tree = dtree::deserialize_tree(read_file(path.string()));
    } catch (const dtree::TreeFormatError& e) {
      throw std::runtime_error(path.string() + ": " + e.what());
    }
    const auto qid = tree.question_id;
    if (!trees.emplace(qid, std::move(tree)).second) {
      throw std::runtime_error("two tree documents for question " + qid);
    }
  }
  return trees;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + temp.string());
  }
  fs::rename(temp, target);
}

std::string tree_file_name(const std::string& question_id) {
  std::string name;
  for (char c : question_id) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                      c == '_' || c == '-';
    name.push_back(keep ? c : '_');
  }
  if (name.empty() || name.front() == '.') name.insert(name.begin(), '_');
  return name + kTreeSuffix;
}

int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto prep = preprocess_config(options.stopwords);
    const auto records = load_answers(options.answers);
    auto built = build_all(records, prep, err);
    if (!built.failures.empty()) return kValidationFailure;

    std::set<std::string> file_names;
    for (const auto& dataset : built.datasets) {
      if (!file_names.insert(tree_file_name(dataset.question_id)).second) {
        err << "error: question ids collide on file name " << tree_file_name(dataset.question_id) << "\n";
        return kValidationFailure;
      }
    }

    dtree::TrainConfig config;
    config.min_gain = options.min_gain;
    auto trees = parallel_map<dtree::DecisionTree>(
        built.datasets, [&config](const corpus::QuestionDataset& d) { return dtree::build_tree(d, config); });

    for (std::size_t i = 0; i < trees.size(); ++i) {
      auto& tree = trees[i];
      tree.trained_at = options.trained_at;
      const auto path = (fs::path(options.out_dir) / tree_file_name(tree.question_id)).string();
      write_file_atomically(path, dtree::serialize_tree(tree));
      const auto& dataset = built.datasets[i];
      out << tree.question_id << ": " << dataset.size() << " samples (" << dataset.correct_count << " correct, "
          << dataset.incorrect_count << " incorrect), " << textprep::unique_word_counts(dataset).all
          << " words, " << tree.internal_node_count() << " rules -> " << path << "\n";
    }
    return kSuccess;
  } catch (const corpus::ParseError& e) {
    err << "error: " << options.answers << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kValidationFailure;
}

int cmd_grade(const GradeOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto prep = preprocess_config(options.stopwords);
    const auto trees = load_trees(options.trees_dir);
    const auto answers =
        corpus::parse_ungraded_file(read_file(options.answers), corpus::format_for_path(options.answers));

    std::set<std::string> missing;
    for (const auto& answer : answers) {
      if (!trees.contains(answer.question_id)) missing.insert(answer.question_id);
    }
    if (!missing.empty()) {
      for (const auto& qid : missing) err << "error: no tree for question " << qid << "\n";
      return kValidationFailure;
    }

    std::string csv_out = "question_id,answer,label,certainty,flagged,critical_word\n";
    std::size_t flagged_count = 0;
    for (const auto& answer : answers) {
      Label label = Label::Incorrect;
      double certainty = 1.0;
      bool flagged = false;
      std::string critical;
      if (!corpus::is_blank(answer.raw_text)) {
        const auto result =
            dtree::classify(trees.at(answer.question_id), textprep::extract_features(answer.raw_text, prep));
        label = result.label;
        certainty = result.certainty;
        flagged = result.certainty < options.threshold || result.out_of_vocabulary;
        critical = result.critical_word.value_or("");
      }
      if (flagged) ++flagged_count;
      csv_out += csv::format_row({answer.question_id, answer.raw_text, std::string(to_string(label)),
                                  format_double(certainty), flagged ? "true" : "false", critical});
    }
    write_file_atomically(options.out, csv_out);
    out << "graded " << answers.size() << " answers, " << flagged_count << " flagged for review -> "
        << options.out << "\n";
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kValidationFailure;
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto prep = preprocess_config(options.stopwords);
    const auto records = load_answers(options.answers);
    auto built = build_all(records, prep, err);
    if (!built.failures.empty()) return kValidationFailure;

    std::vector<corpus::QuestionDataset> usable;
    for (auto& dataset : built.datasets) {
      if (dataset.size() < options.k) {
        err << "warning: skipping question " << dataset.question_id << ": " << dataset.size()
            << " unique answers, fewer than k=" << options.k << "\n";
        continue;
      }
      usable.push_back(std::move(dataset));
    }
    if (usable.empty()) {
      err << "error: no question has enough answers for " << options.k << "-fold cross-validation\n";
      return kValidationFailure;
    }

    dtree::TrainConfig config;
    config.min_gain = options.min_gain;
    const auto accuracies = parallel_map<eval::QuestionAccuracy>(usable, [&](const corpus::QuestionDataset& d) {
      return eval::cross_validate(d, config, eval::make_folds(d, options.k, options.seed));
    });
    std::vector<textprep::UniqueWordCounts> counts;
    for (const auto& dataset : usable) counts.push_back(textprep::unique_word_counts(dataset));

    const auto report = eval::build_report(accuracies, counts);
    const fs::path dir(options.out_dir);
    write_file_atomically((dir / "report.csv").string(), eval::render_csv(report));
    write_file_atomically((dir / "report.json").string(), eval::render_json(report));
    out << eval::render_text(report);
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kValidationFailure;
}

int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto report = eval::build_report(eval::parse_report_csv(read_file(options.fixture)));
    write_file_atomically(options.out, eval::render_json(report));
    out << eval::render_text(report);
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kValidationFailure;
}

int cmd_explain(const ExplainOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto prep = preprocess_config(options.stopwords);
    const auto tree = dtree::deserialize_tree(read_file(options.tree));
    dtree::Explanation explanation;
    if (corpus::is_blank(options.answer)) {
      // Blank submissions are wrong without consulting the tree.
      explanation.label = Label::Incorrect;
      explanation.certainty = 1.0;
    } else {
      explanation = dtree::explain(dtree::classify(tree, textprep::extract_features(options.answer, prep)));
    }
    out << "Student answer: " << options.answer << "\n" << dtree::render(explanation);
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << options.tree << ": " << e.what() << "\n";
  }
  return kValidationFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train, apply and evaluate per-question decision trees for short-answer grading"};
  app.name(args.empty() ? "ospe-grade" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train one tree per question");
  train_cmd->add_option("--answers", train.answers, "Labelled answers (.csv or .json)")->required();
  train_cmd->add_option("--out", train.out_dir, "Directory for <question_id>.tree.json files")->required();
  train_cmd->add_option("--min-gain", train.min_gain, "Minimum information gain for a split")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--stopwords", train.stopwords, "Stopword list replacing the default");
  train_cmd->add_option("--trained-at", train.trained_at, "Timestamp recorded in the tree documents");

  GradeOptions grade;
  auto* grade_cmd = app.add_subcommand("grade", "Grade unlabelled answers with trained trees");
  grade_cmd->add_option("--trees", grade.trees_dir, "Directory of tree documents")->required();
  grade_cmd->add_option("--answers", grade.answers, "Answers to grade (.csv or .json)")->required();
  grade_cmd->add_option("--out", grade.out, "Graded CSV output")->required();
  grade_cmd->add_option("--threshold", grade.threshold, "Flag answers graded below this certainty")
      ->check(CLI::Range(0.0, 1.0));
  grade_cmd->add_option("--stopwords", grade.stopwords, "Stopword list used at training time");

  EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "k-fold cross-validation report");
  evaluate_cmd->add_option("--answers", evaluate.answers, "Labelled answers (.csv or .json)")->required();
  evaluate_cmd->add_option("--out", evaluate.out_dir, "Directory for report.csv and report.json")->required();
  evaluate_cmd->add_option("--k", evaluate.k, "Number of folds")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  evaluate_cmd->add_option("--seed", evaluate.seed, "Seed for fold assignment");
  evaluate_cmd->add_option("--min-gain", evaluate.min_gain, "Minimum information gain for a split")
      ->check(CLI::NonNegativeNumber);
  evaluate_cmd->add_option("--stopwords", evaluate.stopwords, "Stopword list replacing the default");

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Summary and correlations from a per-question table");
  stats_cmd->add_option("--fixture", stats.fixture, "CSV in the report.csv layout")->required();
  stats_cmd->add_option("--out", stats.out, "JSON output")->required();

  ExplainOptions explain;
  auto* explain_cmd = app.add_subcommand("explain", "Show how a tree grades one answer");
  explain_cmd->add_option("--tree", explain.tree, "Tree document")->required();
  explain_cmd->add_option("--answer", explain.answer, "Answer text")->required();
  explain_cmd->add_option("--stopwords", explain.stopwords, "Stopword list used at training time");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  if (*train_cmd) return cmd_train(train, out, err);
  if (*grade_cmd) return cmd_grade(grade, out, err);
  if (*evaluate_cmd) return cmd_evaluate(evaluate, out, err);
  if (*stats_cmd) return cmd_stats(stats, out, err);
  return cmd_explain(explain, out, err);
}

}  // namespace ospe::cli
