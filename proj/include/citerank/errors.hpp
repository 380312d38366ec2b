#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citerank {

/// Malformed input text. The message ends in "at line <n>" (1-based).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " at line " + std::to_string(line)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A network that would violate its invariants (unknown endpoint, empty subset).
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic that is undefined on the given sample.
class DegenerateStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two metric vectors that do not describe the same journals.
class MismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace citerank
