#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace citerank {

/// Record reader for RFC 4180 style CSV (or TSV with delimiter '\t').
///
/// Quoted fields may contain delimiters, doubled quotes and newlines; unquoted
/// fields are whitespace-trimmed. Blank lines are skipped and a leading UTF-8
/// byte-order mark is ignored. An unterminated quote raises ParseError.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char delimiter = ',', std::size_t first_line = 1);

  bool next(std::vector<std::string>& fields);

  /// Line on which the most recently returned record started.
  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool at_start_ = true;
};

/// Quotes a field when it contains the delimiter, a quote, CR/LF or edge whitespace.
std::string csv_escape(std::string_view field, char delimiter = ',');

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace citerank
