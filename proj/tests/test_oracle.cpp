#include "doctest.h"

#include "dsl/ast.hpp"
#include "oracle/oracle.hpp"

#include <cmath>

using namespace emalg;
using namespace emalg::oracle;

namespace {
Expr px(const char* s) { return dsl::parse_expr(s); }
}  // namespace

TEST_CASE("enumeration: epsilon contraction over a shared index") {
  auto r = enumerate_identity(px("eps[i,k,l]*eps[k,n,s]"), px("delta[l,n]*delta[i,s] - delta[l,s]*delta[i,n]"));
  CHECK(r.equal);
  CHECK(r.assignments == 81);
  CHECK(r.message == "equal over 81 assignments");
}

TEST_CASE("enumeration: mutated sign gives a counterexample") {
  auto r = enumerate_identity(px("eps[i,k,l]*eps[k,n,s]"), px("delta[l,s]*delta[i,n] - delta[l,n]*delta[i,s]"));
  CHECK_FALSE(r.equal);
  REQUIRE(r.counterexample.size() == 4);
  // check the reported assignment by hand: sum_k eps[i,k,l] eps[k,n,s]
  auto eps = [](int a, int b, int c) { return (b - a) * (c - a) * (c - b) / 2; };
  int i = r.counterexample["i"], l = r.counterexample["l"], n = r.counterexample["n"], s = r.counterexample["s"];
  int lhs = 0;
  for (int k = 1; k <= 3; ++k) lhs += eps(i, k, l) * eps(k, n, s);
  CHECK(r.lhs_value == Rational(lhs));
  CHECK(r.lhs_value != r.rhs_value);
  CHECK(r.message.rfind("counterexample:", 0) == 0);
}

TEST_CASE("enumeration: triple epsilon sum") {
  // sum_{jk} eps[i,j,k] eps[l,j,k] = 2 delta[i,l]
  auto r = enumerate_identity(px("eps[i,j,k]*eps[l,j,k]"), px("2*delta[i,l]"));
  CHECK(r.equal);
  CHECK(r.assignments == 9);
}

TEST_CASE("enumeration: unit-carrying coefficients are compared per unit") {
  CHECK(enumerate_identity(px("I*hbar*eps[1,2,k]*delta[k,3]"), px("I*hbar")).equal);
  CHECK_FALSE(enumerate_identity(px("I*hbar*eps[1,2,k]*delta[k,3]"), px("hbar")).equal);
}

TEST_CASE("enumeration refuses field operators") {
  CHECK_THROWS_AS(enumerate_identity(px("E[i](x)"), px("E[i](x)")), OracleError);
}

TEST_CASE("regularized deltas have unit area and the right peak") {
  RegularizedDelta rect{Family::Rectangle, 0.1};
  CHECK(rect(0.0) == doctest::Approx(10.0));
  CHECK(rect(0.06) == 0.0);
  RegularizedDelta g{Family::Gaussian, 0.1};
  CHECK(g(0.0) == doctest::Approx(1.0 / (0.1 * std::sqrt(M_PI))));
  double area = 0, h = 1e-4;
  for (double u = -1; u < 1; u += h) area += g(u) * h;
  CHECK(area == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(g.derivative(0.05) == doctest::Approx(-2 * 0.05 / 0.01 * g(0.05)));
}

TEST_CASE("derivative flip holds for the gaussian on the default grid") {
  auto r = check_delta_flip({Family::Gaussian, 0.05}, {});
  CHECK(r.max_error < 1e-9);
  CHECK(r.off_edge_error == r.max_error);
  // central differences: small against the peak slope sqrt(2/e)/(a^2 sqrt(pi))
  double peak = std::sqrt(2 / M_E) / (0.05 * 0.05 * std::sqrt(M_PI));
  CHECK(r.truncation < 1e-2 * peak);
}

TEST_CASE("derivative flip for the rectangle holds away from the jumps") {
  auto r = check_delta_flip({Family::Rectangle, 0.05}, {});
  CHECK(r.off_edge_error < 1e-6);
}

TEST_CASE("flip check rejects an unresolved width") {
  CHECK_THROWS_AS(check_delta_flip({Family::Gaussian, 0.05}, {8.0, 2048}), OracleError);
}

TEST_CASE("integration by parts against regularized deltas") {
  auto f = gaussian_bump(0.2, 0.4), g = gaussian_bump(-0.1, 0.5);
  auto r = check_integration_by_parts(f, g, {Family::Gaussian, 0.05}, {});
  CHECK(r.err1 < 1e-10);
  CHECK(r.err2 < 1e-10);
  // the limit is approached but not reached at finite width
  CHECK(r.limit_error < 1e-2);
  auto rr = check_integration_by_parts(f, g, {Family::Rectangle, 0.05}, {});
  CHECK(rr.err1 < 1e-4);
  CHECK(rr.err2 < 1e-4);
}

TEST_CASE("integration by parts with a polynomial bump") {
  auto f = polynomial_bump(0.0, 1.0), g = polynomial_bump(0.3, 1.5);
  auto r = check_integration_by_parts(f, g, {Family::Gaussian, 0.05}, {});
  CHECK(std::abs(r.left) > 1e-2);
  CHECK(r.err1 < 1e-8);
  CHECK(r.err2 < 1e-8);
}

TEST_CASE("ordering residual: rectangle is exact") {
  for (double a : {0.1, 0.05, 0.02, 0.01}) {
    auto r = check_ordering_residual({Family::Rectangle, a});
    CHECK(std::abs(r.axis_integral) < 1e-12);
    CHECK(r.transverse == doctest::Approx(1.0 / a).epsilon(1e-12));
    CHECK(r.transverse_expected == doctest::Approx(1.0 / a));
  }
}

TEST_CASE("ordering residual: gaussian") {
  for (double a : {0.1, 0.05, 0.02, 0.01}) {
    auto r = check_ordering_residual({Family::Gaussian, a});
    CHECK(std::abs(r.axis_integral) < 1e-10);
    // int exp(-2u^2/a^2)/(pi a^2) du = 1/(a sqrt(2 pi))
    CHECK(r.transverse_expected == doctest::Approx(1.0 / (a * std::sqrt(2 * M_PI))));
    CHECK(r.transverse_error < 1e-6);
  }
}

TEST_CASE("random fields: sifting a sharp delta") {
  Expr lhs = px("int(x)(int(y)(E[1](x)*B[2](y)*ddelta(x,y)))");
  Expr rhs = px("int(x)(E[1](x)*B[2](x))");
  CHECK(random_field_check(lhs, rhs, 1) < 1e-8);
  CHECK(random_field_check(lhs, negate(rhs), 1) > 1e-2);
}

TEST_CASE("random fields: integration by parts moves the derivative") {
  Expr lhs = px("int(x)(int(y)(E[1](x)*B[2](y)*ddelta(x,y)d[x,3]))");
  Expr rhs = px("-int(x)(E[1](x)d[x,3]*B[2](x))");
  for (std::uint64_t seed = 1; seed <= 3; ++seed) CHECK(random_field_check(lhs, rhs, seed) < 1e-8);
  CHECK(random_field_check(lhs, negate(rhs), 2) > 1e-2);
}

TEST_CASE("random fields: free indices are enumerated") {
  Expr lhs = px("eps[i,j,k]*int(x)(E[j](x)*B[k](x))");
  Expr rhs = px("-eps[i,k,j]*int(x)(E[j](x)*B[k](x))");
  CHECK(random_field_check(lhs, rhs, 7) < 1e-10);
}

TEST_CASE("random fields refuse order-sensitive input") {
  // same fields, opposite order: a c-number substitution cannot tell them apart
  Expr lhs = px("int(x)(E[1](x)*B[1](x))");
  Expr rhs = px("int(x)(B[1](x)*E[1](x))");
  CHECK_THROWS_AS(random_field_check(lhs, rhs, 1), OracleError);
}
