#include "doctest.h"

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "sosforge/errors.hpp"
#include "sosforge/poly_parse.hpp"

using namespace sosforge;
using testaux::Rng;

TEST_SUITE("parse") {

TEST_CASE("a quartic objective parses to the function it denotes") {
  PPoly f = parse_ppoly("x1^4 + x2^4 - 2*x2*x1^3 - 3*x2^2*x1^2 + 150*(x1^2 + x2^2)");
  auto want = [](double a, double b) {
    return a * a * a * a + b * b * b * b - 2 * b * a * a * a - 3 * b * b * a * a +
           150.0 * (a * a + b * b);
  };
  Rng rng(601);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.unif(-3.0, 3.0), b = rng.unif(-3.0, 3.0);
    const double got = testaux::ref_eval(f, {{"x1", a}, {"x2", b}})(0, 0);
    const double w = want(a, b);
    CHECK(std::abs(got - w) <= 1e-9 * std::max(1.0, std::abs(w)));
  }
}

TEST_CASE("literals and precedence behave as written") {
  CHECK(testaux::ref_eval(parse_ppoly("0"), {})(0, 0) == 0.0);
  CHECK(testaux::ref_eval(parse_ppoly("1+2*3^2"), {})(0, 0) == 19.0);
  CHECK(testaux::ref_eval(parse_ppoly("(1+2)*3"), {})(0, 0) == 9.0);
  CHECK(testaux::ref_eval(parse_ppoly("2*x1^3"), {{"x1", 2.0}})(0, 0) == 16.0);
  CHECK(testaux::ref_eval(parse_ppoly("-x1^2"), {{"x1", 3.0}})(0, 0) == -9.0);
  CHECK(testaux::ref_eval(parse_ppoly("-x1^2 + x1"), {{"x1", 3.0}})(0, 0) == -6.0);
  CHECK(testaux::ref_eval(parse_ppoly("0.5e1"), {})(0, 0) == 5.0);
  CHECK(testaux::ref_eval(parse_ppoly("x1 - x1"), {{"x1", 7.0}})(0, 0) == 0.0);
}

TEST_CASE("rendered entries parse back to the same polynomial") {
  Rng rng(602);
  for (int t = 0; t < 200; ++t) {
    PPoly p = testaux::random_ppoly(1, 1, rng.range(1, 4), 5, 8, 2.0, rng);
    const std::string txt = entry_text(p);
    PPoly r = parse_ppoly(txt);
    CHECK(entry_text(r) == txt);
    CHECK(parse_ppoly(entry_text(r)) == r);
    for (int u = 0; u < 3; ++u) {
      PointMap pt = testaux::random_point({&p.ivars}, rng);
      const double a = testaux::ref_eval(p, pt)(0, 0);
      PointMap sub;
      for (const auto& n : r.ivars.names) sub[n] = pt.at(n);
      const double b = testaux::ref_eval(r, sub)(0, 0);
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }
}

TEST_CASE("the zero polynomial renders and parses as a bare zero") {
  PPoly z = parse_ppoly("0");
  CHECK(z.coeff.nnz() == 0);
  CHECK(entry_text(z) == "0");
}

TEST_CASE("malformed input is rejected with the offending byte offset") {
  CHECK_THROWS_AS(parse_ppoly(""), ParseError);
  CHECK_THROWS_AS(parse_ppoly("2x1"), ParseError);
  CHECK_THROWS_AS(parse_ppoly("2 x1"), ParseError);
  CHECK_THROWS_AS(parse_ppoly("x1^-1"), ParseError);
  CHECK_THROWS_AS(parse_ppoly("x1^2.5"), ParseError);
  CHECK_THROWS_AS(parse_ppoly("(x1+2"), ParseError);
  CHECK_THROWS_AS(parse_ppoly("x1 + "), ParseError);
  CHECK_THROWS_AS(parse_ppoly("x1 ** 2"), ParseError);

  try {
    parse_ppoly("2 x1");
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  try {
    parse_ppoly("x1^-1");
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.offset == 3);
  }
}

TEST_CASE("identifiers start with a letter or underscore, never a digit") {
  PPoly p = parse_ppoly("_a + 1");
  CHECK(var_index(p.ivars, "_a") == 0);
  CHECK_THROWS_AS(make_varset({"9a"}), ArgumentError);
  CHECK_THROWS_AS(make_varset({""}), ArgumentError);
  CHECK_THROWS_AS(make_varset({"a$"}), ArgumentError);
}

}  // TEST_SUITE
