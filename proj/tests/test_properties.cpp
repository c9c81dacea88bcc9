#include "doctest.h"

#include "properties.hpp"

#include <regex>

using namespace emalg;
using namespace emalg::testing;

TEST_CASE("canonicalize: idempotent and order preserving on random input") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto t = canonical_properties(1000, seed);
    CHECK(t.cases == 1000);
    CHECK_MESSAGE(t.failures == 0, t.first_failure);
  }
}

TEST_CASE("parse and print round trip on random input") {
  for (std::uint64_t seed : {11u, 12u}) {
    auto t = round_trip_properties(1000, seed);
    CHECK(t.cases == 1000);
    CHECK_MESSAGE(t.failures == 0, t.first_failure);
  }
}

TEST_CASE("canonical form ignores term order") {
  RandomExpr gen(5);
  auto join = [](const std::string& a, const std::string& b) {
    return b[0] == '-' ? a + " - " + b.substr(1) : a + " + " + b;
  };
  for (int n = 0; n < 300; ++n) {
    std::string a = gen.term(), b = gen.term();
    Expr ab = dsl::parse_expr(join(a, b));
    Expr ba = dsl::parse_expr(join(b, a));
    REQUIRE_MESSAGE(identical(canonicalize(ab), canonicalize(ba)), a << " | " << b);
  }
}

TEST_CASE("canonical form ignores dummy and integration labels") {
  RandomExpr gen(6);
  // rename every dummy and both points consistently
  const std::regex dummy(R"(\b([abck])\b)");
  for (int n = 0; n < 300; ++n) {
    std::string text = gen.expression(2);
    std::string renamed = std::regex_replace(text, dummy, "q$1");
    renamed = std::regex_replace(renamed, std::regex(R"(\bx\b)"), "u");
    renamed = std::regex_replace(renamed, std::regex(R"(\by\b)"), "v");
    // x[..] coordinate atoms were renamed too; restore the atom name
    renamed = std::regex_replace(renamed, std::regex(R"(\bu\[)"), "x[");
    REQUIRE_MESSAGE(equal_canonical(dsl::parse_expr(text), dsl::parse_expr(renamed)), text << " | " << renamed);
  }
}

TEST_CASE("negation cancels exactly") {
  RandomExpr gen(8);
  for (int n = 0; n < 300; ++n) {
    Expr e = dsl::parse_expr(gen.expression());
    REQUIRE(canonicalize(e + negate(e)).empty());
  }
}

TEST_CASE("swapping two operators is visible") {
  // a single E*B product and its reverse never become equal
  RandomExpr gen(9);
  for (int n = 0; n < 200; ++n) {
    Expr e = canonicalize(dsl::parse_expr(gen.term()));
    if (e.terms.size() != 1 || e.terms[0].ops.size() != 2) continue;
    Term swapped = e.terms[0];
    if (swapped.ops[0].kind == swapped.ops[1].kind) continue;
    std::swap(swapped.ops[0], swapped.ops[1]);
    Expr s = make_expr({swapped});
    CHECK_FALSE(equal_canonical(e, s));
  }
}
