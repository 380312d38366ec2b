#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace citerank {

// Shortest decimal form that parses back to the same double. Locale-independent.
std::string format_double(double value);

// Parses the whole of `text` as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

// 64-bit FNV-1a, used for network fingerprints and input file digests.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) noexcept;
  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t value);

}  // namespace citerank
