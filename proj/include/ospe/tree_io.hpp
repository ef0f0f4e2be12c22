#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ospe/dtree.hpp"

namespace ospe::dtree {

class TreeFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Document layout:
//   {"question_id": ..., "trained_at": ... | null,
//    "config": {"min_gain": ..., "tie_break": "lexicographic", "leaf_tie_label": ...},
//    "root": node}
//   node = {"word"?: ..., "label": "correct"|"incorrect", "count": n, "size": n,
//           "true"?: node, "false"?: node}
// Probabilities are stored as count/size so a round trip is exact.
std::string serialize_tree(const DecisionTree& tree);
DecisionTree deserialize_tree(std::string_view document);

}  // namespace ospe::dtree
