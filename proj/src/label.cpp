#include "ospe/label.hpp"

#include <algorithm>
#include <cctype>

namespace ospe {

std::string_view to_string(Label label) {
  return label == Label::Correct ? "correct" : "incorrect";
}

std::optional<Label> parse_label(std::string_view token) {
  std::string lowered(token);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "correct" || lowered == "1") return Label::Correct;
  if (lowered == "incorrect" || lowered == "0") return Label::Incorrect;
  return std::nullopt;
}

}  // namespace ospe
