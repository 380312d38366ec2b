#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "citerank/csv.hpp"
#include "citerank/errors.hpp"
#include "citerank/format.hpp"
#include "support/generators.hpp"

using namespace citerank;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& text, char delim = ',') {
  std::istringstream in(text);
  CsvReader reader(in, delim);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> f;
  while (reader.next(f)) rows.push_back(f);
  return rows;
}

}  // namespace

TEST_CASE("format_double prints the shortest round-tripping form") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1e-9) == "1e-09");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");

  testgen::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.real(-1.0, 1.0), static_cast<int>(rng.integer(-60, 60)));
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("parse_double rejects partial and empty input") {
  CHECK(parse_double("+2.5") == 2.5);
  CHECK(parse_double("-1e3") == -1000.0);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
}

TEST_CASE("FNV-1a 64 matches published test vectors") {
  Fnv1a64 empty;
  CHECK(hex64(empty.value()) == "cbf29ce484222325");
  Fnv1a64 a;
  a.update("a");
  CHECK(hex64(a.value()) == "af63dc4c8601ec8c");
  Fnv1a64 foobar;
  foobar.update("foo");
  foobar.update("bar");
  CHECK(hex64(foobar.value()) == "85944171f73967e8");
}

TEST_CASE("CsvReader handles quoting, trimming and blank lines") {
  const auto rows = read_all("\xEF\xBB\xBF" "a, b ,c\n\n\"x,1\",\"say \"\"hi\"\"\", z \r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"x,1", "say \"hi\"", "z"});
}

TEST_CASE("CsvReader reports the starting line of multi-line records") {
  std::istringstream in("h\n\"two\nlines\"\nnext\n");
  CsvReader reader(in);
  std::vector<std::string> f;
  REQUIRE(reader.next(f));
  CHECK(reader.record_line() == 1);
  REQUIRE(reader.next(f));
  CHECK(f[0] == "two\nlines");
  CHECK(reader.record_line() == 2);
  REQUIRE(reader.next(f));
  CHECK(reader.record_line() == 4);
}

TEST_CASE("CsvReader rejects an unterminated quote") {
  std::istringstream in("a\n\"open,b\n");
  CsvReader reader(in);
  std::vector<std::string> f;
  REQUIRE(reader.next(f));
  CHECK_THROWS_AS(reader.next(f), ParseError);
}

TEST_CASE("csv_escape round-trips arbitrary fields") {
  testgen::Rng rng(11);
  const std::string alphabet = "ab ,\"\t\n\r;x";
  for (char delim : {',', '\t'}) {
    for (int i = 0; i < 500; ++i) {
      std::vector<std::string> fields(static_cast<std::size_t>(rng.integer(1, 4)));
      for (auto& f : fields) {
        const auto len = rng.integer(1, 8);
        for (int k = 0; k < len; ++k) f += alphabet[static_cast<std::size_t>(rng.integer(0, 10))];
      }
      std::ostringstream out;
      write_csv_row(out, fields, delim);
      const auto rows = read_all(out.str(), delim);
      REQUIRE(rows.size() == 1);
      CHECK(rows[0] == fields);
    }
  }
}
