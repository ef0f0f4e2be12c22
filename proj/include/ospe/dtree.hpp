#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ospe/corpus.hpp"
#include "ospe/label.hpp"
#include "ospe/textprep.hpp"

namespace ospe::dtree {

using textprep::WordSet;

/// Binary entropy in bits of a set with `correct` and `incorrect` members.
/// 0 log 0 is taken as 0. Throws std::invalid_argument on an empty set.
double entropy(std::size_t correct, std::size_t incorrect);

struct SplitEvaluation {
  std::string word;
  std::size_t true_size = 0;   // samples containing the word
  std::size_t false_size = 0;
  double true_entropy = 0.0;
  double false_entropy = 0.0;
  double split_entropy = 0.0;  // size-weighted mean of the two
  double gain = 0.0;           // parent entropy - split_entropy
};

/// Non-owning view of one training example.
struct LabeledFeatures {
  const WordSet* features;
  Label label;
};

std::vector<LabeledFeatures> view_of(const corpus::QuestionDataset& dataset);

SplitEvaluation evaluate_split(std::span<const LabeledFeatures> samples,
                               const std::string& word, double parent_entropy);

struct TrainConfig {
  // Splits with gain below this are not taken. At 0 the tree grows until
  // every leaf is pure or its samples cannot be told apart.
  double min_gain = 0.0;
  // Label for a node whose samples split exactly 50/50.
  Label leaf_tie_label = Label::Incorrect;

  bool operator==(const TrainConfig&) const = default;
};

/// Highest-gain presence test over `candidates`; ties go to the
/// lexicographically smallest word. Words that do not separate the samples
/// (present in all or none) are never chosen. Returns nullopt when the node
/// is pure, nothing separates, or the best gain is below config.min_gain.
std::optional<SplitEvaluation> select_best_rule(std::span<const LabeledFeatures> samples,
                                                const WordSet& candidates,
                                                double parent_entropy,
                                                const TrainConfig& config = {});

struct TreeNode {
  std::optional<std::string> word;  // absent for leaves
  Label label = Label::Incorrect;
  std::uint32_t count = 0;          // training samples at this node carrying `label`
  std::uint32_t size = 0;           // training samples reaching this node
  std::int32_t true_child = -1;
  std::int32_t false_child = -1;

  bool is_leaf() const { return !word.has_value(); }
  double probability() const { return static_cast<double>(count) / size; }
  bool operator==(const TreeNode&) const = default;
};

/// Nodes are stored in preorder (node, true subtree, false subtree); the root
/// is nodes[0].
struct DecisionTree {
  std::string question_id;
  std::optional<std::string> trained_at;
  TrainConfig config;
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  const TreeNode& node(std::int32_t index) const { return nodes.at(static_cast<std::size_t>(index)); }
  std::size_t internal_node_count() const;
  /// Every word tested somewhere in the tree.
  WordSet vocabulary() const;
  bool operator==(const DecisionTree&) const = default;
};

/// Throws std::invalid_argument when the tree violates a structural invariant
/// (child pairing, size bookkeeping, majority labels, repeated path words).
void check_well_formed(const DecisionTree& tree);

DecisionTree build_tree(const corpus::QuestionDataset& dataset, const TrainConfig& config = {});

struct TraceStep {
  std::string word;
  bool present = false;     // branch taken
  Label node_label = Label::Incorrect;
  double node_probability = 0.0;

  bool operator==(const TraceStep&) const = default;
};

struct Classification {
  Label label = Label::Incorrect;
  double certainty = 0.0;           // probability of the leaf reached
  std::vector<TraceStep> trace;     // every rule evaluated, root first
  std::optional<std::string> critical_word;
  bool out_of_vocabulary = false;   // no tested word occurs in the answer
};

Classification classify(const DecisionTree& tree, const WordSet& features);

struct Explanation {
  // Rules that decided the outcome, with importance = node probability.
  std::vector<TraceStep> steps;
  // A last rule whose word was absent and which fell straight through to a
  // leaf; it does not steer the decision and is reported separately.
  std::optional<TraceStep> unmatched_rule;
  // Index into `steps` of the most important rule; nullopt when `steps` is
  // empty, in which case the terminal leaf itself is the decision point.
  std::optional<std::size_t> critical_step;
  Label label = Label::Incorrect;
  double certainty = 0.0;
};

Explanation explain(const Classification& classification);

/// Step list in the "First node "muscles" returns TRUE," style, followed by
/// the verdict and the critical decision point.
std::string render(const Explanation& explanation);

}  // namespace ospe::dtree
