#include <doctest.h>

#include "helpers.hpp"
#include "jointprof/net_format.hpp"

using namespace jointprof;
using namespace jointprof::testing;

namespace {

const char* kMinimalNative = R"({
  "format": "jointprof-net",
  "name": "tiny",
  "variables": [
    {"name": "x", "outcomes": ["no", "yes"], "parents": [], "cpt": [[0.25, 0.75]]}
  ]
})";

}  // namespace

TEST_CASE("native: minimal network") {
  const Network net = parse_native(kMinimalNative);
  CHECK(net.state_count() == 2);
  CHECK(net.variable(0).name == "x");
  CHECK(net.variable(0).cpt == std::vector<double>{0.25, 0.75});
}

TEST_CASE("native: ten identical binary variables") {
  const Network net = parse_native(write_native(iid_binary(10, 0.1)));
  CHECK(net.state_count() == 1024);
  CHECK(net.variable(3).cpt == std::vector<double>{0.1, 0.9});
}

TEST_CASE("native: bad column sum names the variable and column") {
  const std::string text = R"({"variables": [
    {"name": "broken", "outcomes": ["a", "b"], "parents": [], "cpt": [[0.5, 0.3]]}
  ]})";
  try {
    parse_native(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("broken") != std::string::npos);
    CHECK(msg.find("column 0") != std::string::npos);
    REQUIRE(!e.diagnostics().empty());
    CHECK(e.diagnostics()[0].line >= 1);
  }
}

TEST_CASE("native: parents must be declared first") {
  const std::string text = R"({"variables": [
    {"name": "child", "outcomes": ["a", "b"], "parents": ["late"],
     "cpt": [[0.5, 0.5], [0.5, 0.5]]},
    {"name": "late", "outcomes": ["a", "b"], "parents": [], "cpt": [[0.5, 0.5]]}
  ]})";
  CHECK_THROWS_AS(parse_native(text), ParseError);
}

TEST_CASE("native: syntax errors carry positions") {
  try {
    parse_native("{\n  \"variables\": [\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(!e.diagnostics().empty());
    CHECK(e.diagnostics()[0].line >= 2);
  }
}

TEST_CASE("native: write/parse round trip is bit-exact on generator outputs") {
  for (const auto& entry : corpus(33, 9)) {
    const std::string text = write_native(entry.network);
    const Network back = parse_native(text);
    REQUIRE(back.variable_count() == entry.network.variable_count());
    CHECK(back.name() == entry.network.name());
    for (std::size_t i = 0; i < back.variable_count(); ++i) {
      const Variable& a = entry.network.variable(i);
      const Variable& b = back.variable(i);
      CHECK(a.name == b.name);
      CHECK(a.outcomes == b.outcomes);
      CHECK(a.parents == b.parents);
      REQUIRE(a.cpt.size() == b.cpt.size());
      for (std::size_t c = 0; c < a.cpt.size(); ++c) {
        CHECK(a.cpt[c] == b.cpt[c]);  // bit-exact
      }
    }
    // a second trip reproduces the same text verbatim
    CHECK(write_native(back) == text);
  }
}

TEST_CASE("native: 0.1 survives the decimal round trip") {
  const Network net = parse_native(kMinimalNative);
  Variable v = net.variable(0);
  v.cpt = {0.1, 0.9};
  const Network net2 = Network::build("t", {v});
  const Network back = parse_native(write_native(net2));
  CHECK(back.variable(0).cpt[0] == 0.1);
  CHECK(back.variable(0).cpt[1] == 0.9);
}

namespace {

const char* kScreeningBif = R"(
// smallest nontrivial conditional structure
network screening {
}
variable disease {
  type discrete [ 2 ] { present, absent };
}
variable test {
  type discrete [ 2 ] { positive, negative };
}
probability ( disease ) {
  table 0.01, 0.99;
}
probability ( test | disease ) {
  (present) 0.95, 0.05;
  (absent) 0.1, 0.9;
}
)";

}  // namespace

TEST_CASE("bif: two-variable screening structure") {
  const Network net = parse_bif(kScreeningBif);
  CHECK(net.state_count() == 4);
  CHECK(net.variable(0).name == "disease");
  CHECK(net.variable(1).name == "test");
  CHECK(net.variable(1).parents == std::vector<std::uint32_t>{0});
  // (present) column is parent configuration 0
  CHECK(net.variable(1).cpt == std::vector<double>{0.95, 0.05, 0.1, 0.9});
  const Assignment sick_positive = {0, 0};
  CHECK(state_prob(net, sick_positive) == doctest::Approx(0.01 * 0.95).epsilon(1e-15));
}

TEST_CASE("bif: declaration order need not be topological") {
  const std::string text = R"(
network backwards { }
variable effect { type discrete [ 2 ] { on, off }; }
variable cause { type discrete [ 3 ] { lo, mid, hi }; }
probability ( effect | cause ) {
  (lo) 0.9, 0.1;
  (mid) 0.5, 0.5;
  (hi) 0.2, 0.8;
}
probability ( cause ) { table 0.2, 0.3, 0.5; }
)";
  const Network net = parse_bif(text);
  REQUIRE(net.variable_count() == 2);
  CHECK(net.variable(0).name == "cause");
  CHECK(net.variable(1).name == "effect");
  CHECK(net.state_count() == 6);
}

TEST_CASE("bif: cycles are rejected") {
  const std::string text = R"(
network loop { }
variable a { type discrete [ 2 ] { t, f }; }
variable b { type discrete [ 2 ] { t, f }; }
probability ( a | b ) { (t) 0.5, 0.5; (f) 0.5, 0.5; }
probability ( b | a ) { (t) 0.5, 0.5; (f) 0.5, 0.5; }
)";
  try {
    parse_bif(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("bif: continuous variables are an unsupported construct") {
  const std::string text = R"(
network c { }
variable temp { type continuous; }
)";
  try {
    parse_bif(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
  }
}

TEST_CASE("bif: properties are kept as opaque annotations") {
  const std::string text = R"(
network annotated { property version 1.5 ; }
variable x {
  type discrete [ 2 ] { yes, no };
  property position = (100, 200) ;
}
probability ( x ) { table 0.4, 0.6; }
)";
  const Network net = parse_bif(text);
  REQUIRE(net.variable(0).properties.size() == 1);
  CHECK(net.variable(0).properties[0].find("position") != std::string::npos);
}

TEST_CASE("bif: table arity and missing rows are rejected") {
  const std::string missing_row = R"(
network m { }
variable p { type discrete [ 2 ] { a, b }; }
variable q { type discrete [ 2 ] { a, b }; }
probability ( p ) { table 0.5, 0.5; }
probability ( q | p ) { (a) 0.5, 0.5; }
)";
  CHECK_THROWS_AS(parse_bif(missing_row), ParseError);

  const std::string wrong_arity = R"(
network w { }
variable p { type discrete [ 2 ] { a, b }; }
probability ( p ) { table 0.5, 0.3, 0.2; }
)";
  CHECK_THROWS_AS(parse_bif(wrong_arity), ParseError);
}

TEST_CASE("bif: full table form for a conditional") {
  // child outcome fastest, last parent fastest
  const std::string text = R"(
network t { }
variable a { type discrete [ 2 ] { a0, a1 }; }
variable b { type discrete [ 2 ] { b0, b1 }; }
probability ( a ) { table 0.3, 0.7; }
probability ( b | a ) { table 0.1, 0.9, 0.8, 0.2; }
)";
  const Network net = parse_bif(text);
  CHECK(net.variable(1).cpt == std::vector<double>{0.1, 0.9, 0.8, 0.2});
}
