#include "citerank/csv.hpp"

#include <istream>

#include "citerank/errors.hpp"

namespace citerank {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string trim(const std::string& s, char delimiter) {
  auto space = [delimiter](char c) { return c != delimiter && is_space(c); };
  std::size_t b = 0, e = s.size();
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvReader::CsvReader(std::istream& in, char delimiter, std::size_t first_line)
    : in_(in), delimiter_(delimiter), line_(first_line) {}

bool CsvReader::next(std::vector<std::string>& fields) {
  if (at_start_) {
    at_start_ = false;
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        throw ParseError("invalid byte sequence", 1);
      }
    }
  }

  for (;;) {
    fields.clear();
    std::string field;
    bool quoted = false;       // current field began with a quote
    bool in_quotes = false;
    bool after_quote = false;  // closing quote seen, only whitespace may follow
    bool any = false;
    record_line_ = line_;

    auto finish_field = [&] {
      fields.push_back(quoted ? field : trim(field, delimiter_));
      field.clear();
      quoted = in_quotes = after_quote = false;
    };

    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      char c = static_cast<char>(ch);
      any = true;
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == delimiter_) {
        finish_field();
        continue;
      }
      if (c == '\n') {
        ++line_;
        break;
      }
      if (after_quote) {
        if (!is_space(c)) throw ParseError("unexpected character after closing quote", line_);
        continue;
      }
      if (c == '"' && !quoted) {
        bool only_space = true;
        for (char f : field) only_space = only_space && is_space(f);
        if (only_space) {
          field.clear();
          quoted = in_quotes = true;
          continue;
        }
      }
      field.push_back(c);
    }
    if (in_quotes) throw ParseError("unterminated quoted field", record_line_);
    if (!any) return false;
    finish_field();
    if (fields.size() == 1 && fields[0].empty() && !quoted) {
      if (ch == std::char_traits<char>::eof()) return false;
      continue;  // blank line
    }
    return true;
  }
}

std::string csv_escape(std::string_view field, char delimiter) {
  bool needs_quotes = !field.empty() && (is_space(field.front()) || is_space(field.back()));
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') needs_quotes = true;
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(delimiter);
    out << csv_escape(fields[i], delimiter);
  }
  out.put('\n');
}

}  // namespace citerank
