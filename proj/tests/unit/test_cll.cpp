#include <algorithm>
#include <random>

#include "doctest.h"
#include "llweave/cll.hpp"
#include "llweave/error.hpp"
#include "../support/generators.hpp"

using namespace llweave;
using namespace llweave::cll;

namespace {
Formula A = Formula::atom("A");
Formula B = Formula::atom("B");
}  // namespace

TEST_CASE("negate pushes negation to atoms") {
  CHECK(negate(Formula::tensor(A, B)) == Formula::par(negate(A), negate(B)));
  CHECK(negate(Formula::plus(A, B)) == Formula::with(Formula::neg_atom("A"), Formula::neg_atom("B")));
  CHECK(negate(Formula::neg_atom("A")) == A);
}

TEST_CASE("negate is an involution and swaps top connectives") {
  std::mt19937 rng(7);
  for (int i = 0; i < 10000; ++i) {
    Formula f = testing::random_formula(rng, 8);
    REQUIRE(negate(negate(f)) == f);
    if (!f.is_atom()) REQUIRE(negate(f).kind() == dual(f.kind()));
  }
}

TEST_CASE("parse_formula") {
  CHECK(parse_formula("(BRAND * MODEL)") == Formula::tensor(Formula::atom("BRAND"), Formula::atom("MODEL")));
  CHECK(parse_formula("A^") == Formula::neg_atom("A"));
  CHECK(parse_formula("((BRAND * MODEL) * LENGTH_IN)^") ==
        Formula::par(Formula::par(Formula::neg_atom("BRAND"), Formula::neg_atom("MODEL")),
                     Formula::neg_atom("LENGTH_IN")));

  SUBCASE("precedence and associativity") {
    CHECK(parse_formula("A * B + C") == Formula::plus(Formula::tensor(A, B), Formula::atom("C")));
    CHECK(parse_formula("A + B & C") == Formula::with(Formula::plus(A, B), Formula::atom("C")));
    CHECK(parse_formula("A % B * C") == Formula::tensor(Formula::par(A, B), Formula::atom("C")));
    CHECK(parse_formula("A^^") == A);
    CHECK(parse_formula("  PRICE_USD   +EXCEPTION ") ==
          Formula::plus(Formula::atom("PRICE_USD"), Formula::atom("EXCEPTION")));
  }

  SUBCASE("syntax errors carry a position") {
    CHECK_THROWS_AS(parse_formula("A *"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("(A"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("a"), SyntaxError);
    try {
      parse_formula("A B");
      FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
      CHECK(e.position() == 2);
    }
  }
}

TEST_CASE("parse_formula inverts print_formula") {
  std::mt19937 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Formula f = testing::random_formula(rng, 6, {"A", "B_1", "PRICE_NOK"});
    REQUIRE(parse_formula(print_formula(f)) == f);
  }
}

TEST_CASE("sequent_union") {
  AnnotatedSequent x{{"x", A}};
  AnnotatedSequent y{{"y", B}};
  CHECK(sequent_union(x, y) == AnnotatedSequent{{"x", A}, {"y", B}});
  CHECK(sequent_union(AnnotatedSequent{}, x) == x);
  try {
    sequent_union(x, AnnotatedSequent{{"x", B}});
    FAIL("expected clash");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ChannelClash);
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
}

TEST_CASE("sequent equality ignores entry order") {
  std::mt19937 rng(3);
  std::vector<Entry> entries;
  for (int i = 0; i < 6; ++i) {
    entries.push_back(Entry{ChannelName("c", static_cast<std::uint32_t>(i)), testing::random_formula(rng, 3)});
  }
  AnnotatedSequent s(entries);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(entries.begin(), entries.end(), rng);
    REQUIRE(AnnotatedSequent(entries) == s);
  }
  CHECK_FALSE(s == s.without("c_1"));
}

TEST_CASE("parse_sequent") {
  auto s = parse_sequent("cic:LENGTH_CM^, cii:LENGTH_IN");
  CHECK(s == AnnotatedSequent{{"cic", Formula::neg_atom("LENGTH_CM")}, {"cii", Formula::atom("LENGTH_IN")}});
  CHECK(parse_sequent("").empty());
  CHECK(parse_sequent("z_3:(A * B)").channel_list().front() == ChannelName("z", 3));
  CHECK_THROWS_AS(parse_sequent("x A"), SyntaxError);
}
