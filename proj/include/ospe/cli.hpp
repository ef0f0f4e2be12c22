#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ospe::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

inline constexpr double kDefaultCertaintyThreshold = 0.70;

struct TrainOptions {
  std::string answers;
  std::string out_dir;
  double min_gain = 0.0;
  std::optional<std::string> stopwords;
  std::optional<std::string> trained_at;
};

struct GradeOptions {
  std::string trees_dir;
  std::string answers;
  std::string out;
  double threshold = kDefaultCertaintyThreshold;
  std::optional<std::string> stopwords;
};

struct EvaluateOptions {
  std::string answers;
  std::string out_dir;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  double min_gain = 0.0;
  std::optional<std::string> stopwords;
};

struct StatsOptions {
  std::string fixture;
  std::string out;
};

struct ExplainOptions {
  std::string tree;
  std::string answer;
  std::optional<std::string> stopwords;
};

int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);
int cmd_grade(const GradeOptions& options, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);
int cmd_explain(const ExplainOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches to a subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// File name used for a question's tree document; characters outside
/// [A-Za-z0-9._-] become '_'.
std::string tree_file_name(const std::string& question_id);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomically(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace ospe::cli
