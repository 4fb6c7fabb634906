#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "corpus.hpp"
#include "limitforge/funcdsl.hpp"

using limitforge::check_hypotheses;
using limitforge::DomainError;
using limitforge::FunctionExpr;
using limitforge::NodeKind;
using limitforge::ParseError;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> sample_points() {
  std::vector<double> pts;
  for (int i = 0; i < 64; ++i) pts.push_back(0.75 + 1.37 * i + 0.001 * i * i * i);
  return pts;
}

}  // namespace

TEST_CASE("basic evaluation") {
  CHECK(FunctionExpr::parse("1/t").evaluate(2.0) == 0.5);
  CHECK(FunctionExpr::parse("ln(t)/t").evaluate(1.0) == 0.0);
  CHECK(FunctionExpr::parse("exp(-t)").evaluate(0.0) == 1.0);
}

TEST_CASE("tree shapes follow the grammar") {
  const auto q = FunctionExpr::parse("1/t");
  REQUIRE(q.size() == 3);
  CHECK(q.nodes()[2].kind == NodeKind::Divide);
  CHECK(q.nodes()[0].kind == NodeKind::Constant);
  CHECK(q.nodes()[1].kind == NodeKind::Variable);

  const auto l = FunctionExpr::parse("ln(t)/t");
  CHECK(l.nodes().back().kind == NodeKind::Divide);
  CHECK(l.nodes()[l.nodes().back().lhs].kind == NodeKind::Ln);
}

TEST_CASE("precedence and associativity") {
  CHECK(FunctionExpr::parse("1+2*3").evaluate(0) == 7.0);
  CHECK(FunctionExpr::parse("(1+2)*3").evaluate(0) == 9.0);
  CHECK(FunctionExpr::parse("8/4/2").evaluate(0) == 1.0);
  CHECK(FunctionExpr::parse("8-4-2").evaluate(0) == 2.0);
  CHECK(FunctionExpr::parse("-t^2").evaluate(3.0) == -9.0);
  CHECK(FunctionExpr::parse("2*t^2").evaluate(3.0) == 18.0);
}

TEST_CASE("syntax errors carry offset and expected set") {
  try {
    FunctionExpr::parse("t^(0.5");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);
    REQUIRE(e.expected().size() == 1);
    CHECK(e.expected()[0] == ")");
  }
  CHECK_THROWS_AS(FunctionExpr::parse(""), ParseError);
  CHECK_THROWS_AS(FunctionExpr::parse("1 +"), ParseError);
  CHECK_THROWS_AS(FunctionExpr::parse("(t"), ParseError);
  CHECK_THROWS_AS(FunctionExpr::parse("t t"), ParseError);
}

TEST_CASE("exponents must be numeric literals") {
  CHECK_THROWS_WITH_AS(FunctionExpr::parse("t^t"), doctest::Contains("numeric literal"),
                       ParseError);
  CHECK_THROWS_WITH_AS(FunctionExpr::parse("2^3^4"), doctest::Contains("chained"), ParseError);
  CHECK_THROWS_AS(FunctionExpr::parse("t^(1+1)"), ParseError);
}

TEST_CASE("unknown identifiers are rejected") {
  try {
    FunctionExpr::parse("cos(t)");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("cos") != std::string::npos);
  }
  CHECK_THROWS_AS(FunctionExpr::parse("T"), ParseError);
  CHECK_THROWS_AS(FunctionExpr::parse("x"), ParseError);
}

TEST_CASE("domain errors name the subexpression and t") {
  try {
    FunctionExpr::parse("1 + ln(t - 2)").evaluate(1.0);
    FAIL("no error");
  } catch (const DomainError& e) {
    CHECK(e.at() == 1.0);
    CHECK(e.subexpression().find("ln") != std::string::npos);
  }
  CHECK_THROWS_AS(FunctionExpr::parse("1/t").evaluate(0.0), DomainError);
  CHECK_THROWS_AS(FunctionExpr::parse("sqrt(t)").evaluate(-1.0), DomainError);
  CHECK_THROWS_AS(FunctionExpr::parse("t^0.5").evaluate(-1.0), DomainError);
  CHECK(FunctionExpr::parse("t^3").evaluate(-2.0) == -8.0);
}

TEST_CASE("round trip over the corpus is bit exact") {
  REQUIRE(kExpressionCorpus.size() >= 30);
  const auto pts = sample_points();
  for (const auto& text : kExpressionCorpus) {
    const std::string name = text;
    CAPTURE(name);
    const auto original = FunctionExpr::parse(text);
    const auto again = FunctionExpr::parse(original.render());
    CHECK(again.render() == original.render());
    for (double t : pts) {
      double a = NAN, b = NAN;
      bool threw_a = false, threw_b = false;
      try {
        a = original.evaluate(t);
      } catch (const DomainError&) {
        threw_a = true;
      }
      try {
        b = again.evaluate(t);
      } catch (const DomainError&) {
        threw_b = true;
      }
      CHECK(threw_a == threw_b);
      if (!threw_a) CHECK(bit_equal(a, b));
    }
  }
}

TEST_CASE("evaluation is deterministic") {
  const auto e = FunctionExpr::parse("exp(sin(t)) * sqrt(t + 1) / ln(t + 2)");
  for (double t : sample_points()) CHECK(bit_equal(e.evaluate(t), e.evaluate(t)));
}

TEST_CASE("monomial and exponential recognition") {
  auto m = FunctionExpr::parse("3*t^2").as_monomial();
  REQUIRE(m);
  CHECK(m->coefficient == 3.0);
  CHECK(m->power == 2.0);
  m = FunctionExpr::parse("t").as_monomial();
  REQUIRE(m);
  CHECK(m->power == 1.0);
  m = FunctionExpr::parse("t^(-1)").as_monomial();
  REQUIRE(m);
  CHECK(m->power == -1.0);
  CHECK_FALSE(FunctionExpr::parse("t + 1").as_monomial());
  CHECK(FunctionExpr::parse("exp(t)").as_scaled_exp() == 1.0);
  CHECK(FunctionExpr::parse("2*exp(t)").as_scaled_exp() == 2.0);
  CHECK_FALSE(FunctionExpr::parse("exp(2*t)").as_scaled_exp());
}

TEST_CASE("check_hypotheses samples") {
  auto v = check_hypotheses(FunctionExpr::parse("1/t"), 1, 1e6, 100);
  CHECK(v.positive_on_samples);
  REQUIRE(v.non_increasing_from);
  CHECK(*v.non_increasing_from == 1.0);
  CHECK(v.samples_used == 100);
  CHECK(v.grid.size() == 100);
  CHECK(v.grid.front() == 1.0);
  CHECK(v.grid.back() == 1e6);

  v = check_hypotheses(FunctionExpr::parse("ln(t)/t"), 1, 1e6, 1000);
  CHECK(v.positive_on_samples);
  REQUIRE(v.non_increasing_from);
  CHECK(*v.non_increasing_from == doctest::Approx(std::exp(1.0)).epsilon(0.02));
  CHECK_FALSE(v.non_decreasing_on_samples);

  v = check_hypotheses(FunctionExpr::parse("t"), 0, 10, 10);
  CHECK(v.positive_on_samples);
  CHECK(v.non_decreasing_on_samples);
  CHECK_FALSE(v.non_increasing_from);
  CHECK(v.grid[1] - v.grid[0] == doctest::Approx(10.0 / 9.0));

  CHECK_FALSE(check_hypotheses(FunctionExpr::parse("t - 5"), 1, 10, 10).positive_on_samples);
  CHECK_THROWS_AS(check_hypotheses(FunctionExpr::parse("t"), 2, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(check_hypotheses(FunctionExpr::parse("t"), 1, 2, 1), std::invalid_argument);
}

TEST_CASE("arithmetic composition") {
  const auto f = FunctionExpr::parse("t") * FunctionExpr::parse("t") + FunctionExpr::constant(1);
  CHECK(f.evaluate(3.0) == 10.0);
  CHECK((FunctionExpr::constant(1) / FunctionExpr::parse("t")).evaluate(4.0) == 0.25);
  CHECK(FunctionExpr::parse(f.render()).evaluate(3.0) == 10.0);
}
