#include "ospe/dtree.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ospe::dtree {

namespace {

// Splits whose gains differ by less than this are treated as tied so the
// lexicographic rule, not rounding noise, picks the word.
constexpr double kGainTieTolerance = 1e-12;

double plogp_term(std::size_t part, std::size_t total) {
  if (part == 0) return 0.0;
  const double p = static_cast<double>(part) / static_cast<double>(total);
  return -p * std::log2(p);
}

struct Majority {
  Label label;
  std::size_t count;
};

Majority majority(std::size_t correct, std::size_t incorrect, Label tie_label) {
  if (correct > incorrect) return {Label::Correct, correct};
  if (incorrect > correct) return {Label::Incorrect, incorrect};
  return {tie_label, correct};
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledFeatures> samples, const TrainConfig& config)
      : samples_(samples), config_(config) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(samples_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(all);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(const std::vector<std::size_t>& indices) {
    std::vector<LabeledFeatures> subset;
    subset.reserve(indices.size());
    std::size_t correct = 0;
    for (auto i : indices) {
      subset.push_back(samples_[i]);
      if (samples_[i].label == Label::Correct) ++correct;
    }
    const std::size_t incorrect = indices.size() - correct;
    const auto vote = majority(correct, incorrect, config_.leaf_tie_label);

    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({std::nullopt, vote.label, static_cast<std::uint32_t>(vote.count),
                      static_cast<std::uint32_t>(indices.size()), -1, -1});

    WordSet candidates;
    for (const auto& sample : subset) {
      for (const auto& word : *sample.features) {
        if (!path_.contains(word)) candidates.insert(word);
      }
    }
    const auto rule = select_best_rule(subset, candidates, entropy(correct, incorrect), config_);
    if (!rule) return index;

    std::vector<std::size_t> with_word;
    std::vector<std::size_t> without_word;
    for (auto i : indices) {
      (samples_[i].features->contains(rule->word) ? with_word : without_word).push_back(i);
    }

    path_.insert(rule->word);
    const auto true_child = grow(with_word);
    const auto false_child = grow(without_word);
    path_.erase(rule->word);

    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.word = rule->word;
    node.true_child = true_child;
    node.false_child = false_child;
    return index;
  }

  std::span<const LabeledFeatures> samples_;
  const TrainConfig& config_;
  std::vector<TreeNode> nodes_;
  WordSet path_;
};

void check_node(const DecisionTree& tree, std::int32_t index, WordSet& path, std::size_t& visited) {
  if (index < 0 || static_cast<std::size_t>(index) >= tree.nodes.size()) {
    throw std::invalid_argument("child index out of range");
  }
  ++visited;
  const auto& node = tree.node(index);
  if (node.size == 0) throw std::invalid_argument("node with zero samples");
  if (node.count > node.size) throw std::invalid_argument("node count exceeds size");
  if (2 * static_cast<std::uint64_t>(node.count) < node.size) {
    throw std::invalid_argument("node label is not the majority class");
  }
  if (2 * static_cast<std::uint64_t>(node.count) == node.size && node.label != tree.config.leaf_tie_label) {
    throw std::invalid_argument("tied node does not carry the configured tie label");
  }
  const bool has_true = node.true_child >= 0;
  const bool has_false = node.false_child >= 0;
  if (node.is_leaf()) {
    if (has_true || has_false) throw std::invalid_argument("leaf node has children");
    return;
  }
  if (!has_true || !has_false) throw std::invalid_argument("internal node needs both children");
  if (node.word->empty()) throw std::invalid_argument("empty rule word");
  if (!path.insert(*node.word).second) {
    throw std::invalid_argument("word '" + *node.word + "' tested twice on one path");
  }
  const auto& t = tree.node(node.true_child);
  const auto& f = tree.node(node.false_child);
  if (t.size + f.size != node.size) throw std::invalid_argument("child sizes do not add up to parent size");
  check_node(tree, node.true_child, path, visited);
  check_node(tree, node.false_child, path, visited);
  path.erase(*node.word);
}

const char* ordinal(std::size_t position) {
  static const char* const names[] = {"First", "Second", "Third", "Fourth", "Fifth",
                                      "Sixth", "Seventh", "Eighth", "Ninth", "Tenth"};
  return position < std::size(names) ? names[position] : nullptr;
}

std::string percent(double probability) {
  return std::to_string(static_cast<long>(std::lround(probability * 100.0))) + "%";
}

}  // namespace

double entropy(std::size_t correct, std::size_t incorrect) {
  const std::size_t total = correct + incorrect;
  if (total == 0) throw std::invalid_argument("entropy of an empty set is undefined");
  // Summation order is irrelevant for IEEE addition, so entropy(C, I) and
  // entropy(I, C) are bit-identical.
  return plogp_term(correct, total) + plogp_term(incorrect, total);
}

std::vector<LabeledFeatures> view_of(const corpus::QuestionDataset& dataset) {
  std::vector<LabeledFeatures> view;
  view.reserve(dataset.samples.size());
  for (const auto& sample : dataset.samples) view.push_back({&sample.features, sample.label});
  return view;
}

SplitEvaluation evaluate_split(std::span<const LabeledFeatures> samples, const std::string& word,
                               double parent_entropy) {
  if (samples.empty()) throw std::invalid_argument("evaluate_split needs at least one sample");
  std::size_t true_correct = 0, true_incorrect = 0, false_correct = 0, false_incorrect = 0;
  for (const auto& sample : samples) {
    const bool present = sample.features->contains(word);
    const bool correct = sample.label == Label::Correct;
    if (present) (correct ? true_correct : true_incorrect)++;
    else (correct ? false_correct : false_incorrect)++;
  }

  SplitEvaluation split;
  split.word = word;
  split.true_size = true_correct + true_incorrect;
  split.false_size = false_correct + false_incorrect;
  split.true_entropy = split.true_size ? entropy(true_correct, true_incorrect) : 0.0;
  split.false_entropy = split.false_size ? entropy(false_correct, false_incorrect) : 0.0;
  const double n = static_cast<double>(samples.size());
  split.split_entropy = (static_cast<double>(split.true_size) * split.true_entropy +
                         static_cast<double>(split.false_size) * split.false_entropy) / n;
  // A vacuous split leaves the node unchanged.
  split.gain = (split.true_size == 0 || split.false_size == 0) ? 0.0 : parent_entropy - split.split_entropy;
  return split;
}

std::optional<SplitEvaluation> select_best_rule(std::span<const LabeledFeatures> samples,
                                                const WordSet& candidates, double parent_entropy,
                                                const TrainConfig& config) {
  if (samples.empty() || candidates.empty() || parent_entropy <= 0.0) return std::nullopt;

  std::optional<SplitEvaluation> best;
  // WordSet iterates in lexicographic order, so only a strictly larger gain
  // displaces the current best.
  for (const auto& word : candidates) {
    auto split = evaluate_split(samples, word, parent_entropy);
    if (split.true_size == 0 || split.false_size == 0) continue;
    if (!best || split.gain > best->gain + kGainTieTolerance) best = std::move(split);
  }
  if (best && best->gain < config.min_gain) return std::nullopt;
  return best;
}

std::size_t DecisionTree::internal_node_count() const {
  std::size_t count = 0;
  for (const auto& node : nodes) count += node.is_leaf() ? 0 : 1;
  return count;
}

WordSet DecisionTree::vocabulary() const {
  WordSet words;
  for (const auto& node : nodes) {
    if (node.word) words.insert(*node.word);
  }
  return words;
}

void check_well_formed(const DecisionTree& tree) {
  if (tree.nodes.empty()) throw std::invalid_argument("tree has no nodes");
  if (!std::isfinite(tree.config.min_gain) || tree.config.min_gain < 0.0) {
    throw std::invalid_argument("min_gain must be finite and non-negative");
  }
  WordSet path;
  std::size_t visited = 0;
  check_node(tree, 0, path, visited);
  if (visited != tree.nodes.size()) throw std::invalid_argument("tree contains unreachable or shared nodes");
}

DecisionTree build_tree(const corpus::QuestionDataset& dataset, const TrainConfig& config) {
  if (dataset.samples.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  if (!std::isfinite(config.min_gain) || config.min_gain < 0.0) {
    throw std::invalid_argument("min_gain must be finite and non-negative");
  }
  const auto samples = view_of(dataset);
  DecisionTree tree;
  tree.question_id = dataset.question_id;
  tree.config = config;
  tree.nodes = TreeBuilder(samples, config).build();
  return tree;
}

Classification classify(const DecisionTree& tree, const WordSet& features) {
  Classification result;
  std::int32_t index = 0;
  bool matched_any = false;
  while (true) {
    const auto& node = tree.node(index);
    if (node.is_leaf()) {
      result.label = node.label;
      result.certainty = node.probability();
      break;
    }
    const bool present = features.contains(*node.word);
    matched_any = matched_any || present;
    result.trace.push_back({*node.word, present, node.label, node.probability()});
    index = present ? node.true_child : node.false_child;
  }
  if (!matched_any) {
    // Words tested off the traversed path cannot matter, but the flag is about
    // the tree's whole vocabulary.
    const auto vocabulary = tree.vocabulary();
    bool shares_word = false;
    for (const auto& word : features) {
      if (vocabulary.contains(word)) {
        shares_word = true;
        break;
      }
    }
    result.out_of_vocabulary = !shares_word;
  }
  const auto explanation = explain(result);
  if (explanation.critical_step) result.critical_word = explanation.steps[*explanation.critical_step].word;
  return result;
}

Explanation explain(const Classification& classification) {
  Explanation explanation;
  explanation.label = classification.label;
  explanation.certainty = classification.certainty;
  explanation.steps = classification.trace;
  if (!explanation.steps.empty() && !explanation.steps.back().present) {
    explanation.unmatched_rule = explanation.steps.back();
    explanation.steps.pop_back();
  }
  for (std::size_t i = 0; i < explanation.steps.size(); ++i) {
    if (!explanation.critical_step ||
        explanation.steps[i].node_probability > explanation.steps[*explanation.critical_step].node_probability) {
      explanation.critical_step = i;
    }
  }
  return explanation;
}

std::string render(const Explanation& explanation) {
  std::ostringstream out;
  for (std::size_t i = 0; i < explanation.steps.size(); ++i) {
    const auto& step = explanation.steps[i];
    if (const char* name = ordinal(i)) out << name << " node";
    else out << "Node " << (i + 1);
    out << " \"" << step.word << "\" returns " << (step.present ? "TRUE" : "FALSE")
        << (i + 1 == explanation.steps.size() ? "." : ",") << "\n";
  }
  if (explanation.unmatched_rule) {
    out << "(\"" << explanation.unmatched_rule->word << "\" is absent; no further rule applies.)\n";
  }
  out << "DT returns \"answer is " << to_string(explanation.label) << " (" << percent(explanation.certainty)
      << " significance)\"\n";
  if (explanation.critical_step) {
    const auto& step = explanation.steps[*explanation.critical_step];
    out << "Critical decision point: \"" << step.word << "\" (importance " << percent(step.node_probability)
        << ")\n";
  } else {
    out << "Critical decision point: terminal node (importance " << percent(explanation.certainty) << ")\n";
  }
  return out.str();
}

}  // namespace ospe::dtree
