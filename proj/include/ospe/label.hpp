#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ospe {

// Grades are binary; there is no partial credit.
enum class Label { Correct, Incorrect };

std::string_view to_string(Label label);

// Accepts correct|incorrect|1|0, case-insensitive.
std::optional<Label> parse_label(std::string_view token);

inline Label other(Label label) {
  return label == Label::Correct ? Label::Incorrect : Label::Correct;
}

}  // namespace ospe
