#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

using namespace gvarkit;

TEST_SUITE("strings") {

TEST_CASE("format_full_double round-trips exactly") {
  const double cases[] = {0.0,
                          1.0,
                          -1.0,
                          0.1,
                          1.0 / 3.0,
                          3.141592653589793,
                          -2.2250738585072014e-308,
                          1.7976931348623157e308,
                          123456.789,
                          5e-324};
  for (double x : cases) {
    // strtod, not std::stod: stod throws out_of_range on subnormals.
    const std::string s = format_full_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("format_fixed pads and rounds") {
  CHECK(format_fixed(3.14159, 2) == "3.14");
  CHECK(format_fixed(3.14159, 4) == "3.1416");
  CHECK(format_fixed(2.0, 4) == "2.0000");
  CHECK(format_fixed(-0.5, 1) == "-0.5");
  CHECK(format_fixed(0.005578123, 6) == "0.005578");
}

TEST_CASE("split_csv_line handles quoting") {
  auto cells = split_csv_line("a,b,c");
  REQUIRE(cells.size() == 3);
  CHECK(cells[1] == "b");

  cells = split_csv_line(R"(a,"b,c",d)");
  REQUIRE(cells.size() == 3);
  CHECK(cells[1] == "b,c");

  cells = split_csv_line(R"("he said ""hi""",x)");
  REQUIRE(cells.size() == 2);
  CHECK(cells[0] == "he said \"hi\"");

  cells = split_csv_line("a,,c");
  REQUIRE(cells.size() == 3);
  CHECK(cells[1].empty());
}

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  x y  ") == "x y");
  CHECK(trim("\t\r\n") == "");
  CHECK(trim("plain") == "plain");
}

TEST_CASE("parse_double accepts numbers and rejects junk") {
  CHECK(parse_double("1.5", "t") == 1.5);
  CHECK(parse_double("-3e2", "t") == -300.0);
  CHECK_THROWS_AS(parse_double("abc", "field x"), DataError);
  CHECK_THROWS_AS(parse_double("", "field x"), DataError);
  CHECK_THROWS_AS(parse_double("1.5junk", "field x"), DataError);
  try {
    parse_double("nope", "my context");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("my context") != std::string::npos);
  }
}

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

}  // TEST_SUITE
