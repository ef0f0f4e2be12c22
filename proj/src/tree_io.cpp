#include "ospe/tree_io.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace ospe::dtree {

namespace {

using nlohmann::ordered_json;

// Deep enough for any tree over a realistic answer vocabulary; guards the
// recursive reader against hostile documents.
constexpr int kMaxDepth = 4096;

ordered_json node_to_json(const DecisionTree& tree, std::int32_t index) {
  const auto& node = tree.node(index);
  ordered_json out;
  if (node.word) out["word"] = *node.word;
  out["label"] = to_string(node.label);
  out["count"] = node.count;
  out["size"] = node.size;
  if (!node.is_leaf()) {
    out["true"] = node_to_json(tree, node.true_child);
    out["false"] = node_to_json(tree, node.false_child);
  }
  return out;
}

std::uint32_t read_count(const ordered_json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) throw TreeFormatError(std::string("node is missing '") + key + "'");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    throw TreeFormatError(std::string("'") + key + "' must be a non-negative integer");
  }
  const auto value = it->get<unsigned long long>();
  if (value > std::numeric_limits<std::uint32_t>::max()) {
    throw TreeFormatError(std::string("'") + key + "' is too large");
  }
  return static_cast<std::uint32_t>(value);
}

Label read_label(const ordered_json& value, const char* what) {
  if (!value.is_string()) throw TreeFormatError(std::string(what) + " must be a string");
  const auto text = value.get<std::string>();
  if (text == "correct") return Label::Correct;
  if (text == "incorrect") return Label::Incorrect;
  throw TreeFormatError(std::string(what) + " must be \"correct\" or \"incorrect\", got \"" + text + "\"");
}

std::int32_t read_node(const ordered_json& object, std::vector<TreeNode>& nodes, int depth) {
  if (depth > kMaxDepth) throw TreeFormatError("tree is nested too deeply");
  if (!object.is_object()) throw TreeFormatError("node must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (key != "word" && key != "label" && key != "count" && key != "size" && key != "true" && key != "false") {
      throw TreeFormatError("unknown node key '" + key + "'");
    }
  }

  TreeNode node;
  if (const auto it = object.find("word"); it != object.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      throw TreeFormatError("'word' must be a non-empty string");
    }
    node.word = it->get<std::string>();
  }
  const auto label = object.find("label");
  if (label == object.end()) throw TreeFormatError("node is missing 'label'");
  node.label = read_label(*label, "'label'");
  node.count = read_count(object, "count");
  node.size = read_count(object, "size");

  const bool has_true = object.contains("true");
  const bool has_false = object.contains("false");
  if (has_true != has_false) throw TreeFormatError("node must have both 'true' and 'false' children or neither");
  if (node.word.has_value() != has_true) {
    throw TreeFormatError(node.word ? "node with a 'word' needs children" : "node without a 'word' cannot have children");
  }

  const auto index = static_cast<std::int32_t>(nodes.size());
  nodes.push_back(node);
  if (has_true) {
    const auto t = read_node(object.at("true"), nodes, depth + 1);
    const auto f = read_node(object.at("false"), nodes, depth + 1);
    nodes[static_cast<std::size_t>(index)].true_child = t;
    nodes[static_cast<std::size_t>(index)].false_child = f;
  }
  return index;
}

}  // namespace

std::string serialize_tree(const DecisionTree& tree) {
  check_well_formed(tree);
  ordered_json document;
  document["question_id"] = tree.question_id;
  document["trained_at"] = tree.trained_at ? ordered_json(*tree.trained_at) : ordered_json(nullptr);
  document["config"] = {{"min_gain", tree.config.min_gain},
                        {"tie_break", "lexicographic"},
                        {"leaf_tie_label", to_string(tree.config.leaf_tie_label)}};
  document["root"] = node_to_json(tree, 0);
  return document.dump(2) + "\n";
}

DecisionTree deserialize_tree(std::string_view document) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(document);
  } catch (const ordered_json::parse_error& e) {
    throw TreeFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw TreeFormatError("tree document must be a JSON object");

  DecisionTree tree;
  const auto qid = parsed.find("question_id");
  if (qid == parsed.end() || !qid->is_string()) throw TreeFormatError("'question_id' must be a string");
  tree.question_id = qid->get<std::string>();

  if (const auto it = parsed.find("trained_at"); it != parsed.end() && !it->is_null()) {
    if (!it->is_string()) throw TreeFormatError("'trained_at' must be a string or null");
    tree.trained_at = it->get<std::string>();
  }

  if (const auto config = parsed.find("config"); config != parsed.end()) {
    if (!config->is_object()) throw TreeFormatError("'config' must be an object");
    if (const auto it = config->find("min_gain"); it != config->end()) {
      if (!it->is_number()) throw TreeFormatError("'config.min_gain' must be a number");
      tree.config.min_gain = it->get<double>();
      if (!std::isfinite(tree.config.min_gain) || tree.config.min_gain < 0.0) {
        throw TreeFormatError("'config.min_gain' must be finite and non-negative");
      }
    }
    if (const auto it = config->find("tie_break"); it != config->end()) {
      if (!it->is_string() || it->get<std::string>() != "lexicographic") {
        throw TreeFormatError("'config.tie_break' must be \"lexicographic\"");
      }
    }
    if (const auto it = config->find("leaf_tie_label"); it != config->end()) {
      tree.config.leaf_tie_label = read_label(*it, "'config.leaf_tie_label'");
    }
  }

  const auto root = parsed.find("root");
  if (root == parsed.end()) throw TreeFormatError("document is missing 'root'");
  read_node(*root, tree.nodes, 0);
  try {
    check_well_formed(tree);
  } catch (const std::invalid_argument& e) {
    throw TreeFormatError(e.what());
  }
  return tree;
}

}  // namespace ospe::dtree
