#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ospe::csv {

using Row = std::vector<std::string>;

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// RFC 4180: comma separated, double-quoted fields may hold commas, CR/LF and
/// doubled quotes. Accepts LF or CRLF record ends and a missing final newline.
/// A leading UTF-8 BOM is skipped.
std::vector<Row> parse(std::string_view content);

/// Quotes a field only when it contains a comma, quote, CR or LF, or has
/// leading/trailing spaces.
std::string quote(std::string_view field);

std::string format_row(const Row& row);

}  // namespace ospe::csv
