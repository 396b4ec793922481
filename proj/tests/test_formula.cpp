#include <gtest/gtest.h>

#include <random>

#include "ptstl/io.hpp"
#include "ptstl/ptstl.hpp"
#include "support.hpp"

using namespace ptstl;

namespace {
const std::vector<std::string> kXY{"x", "y"};
}

TEST(Parser, PreviouslyExample) {
  const auto f = parse_formula("P[0,3] (x > 5)", kXY);
  const auto expected = prev(Interval(0, 3), pred(0, "x", Cmp::Greater, 5));
  EXPECT_EQ(f, expected);
  EXPECT_EQ(f.to_string(), "P[0,3] (x > 5)");
}

TEST(Parser, True) {
  EXPECT_EQ(parse_formula("true", kXY), Formula::truth());
  EXPECT_EQ(Formula::truth().to_string(), "true");
}

TEST(Parser, SinceExample) {
  const auto f = parse_formula("(P[0,5] (y < 0)) S[0,20] (x > 12)", kXY);
  const auto expected =
      since(prev(Interval(0, 5), pred(1, "y", Cmp::Less, 0)), Interval(0, 20), pred(0, "x", Cmp::Greater, 12));
  EXPECT_EQ(f, expected);
}

TEST(Printer, ConjunctionExample) {
  const std::vector<std::string> schema{"qGust", "wGust"};
  const auto f = prev(Interval(4, 10), pred(0, "qGust", Cmp::Less, 0)) && pred(1, "wGust", Cmp::Less, -120);
  EXPECT_EQ(f.to_string(), "(P[4,10] (qGust < 0)) and (wGust < -120)");
  EXPECT_EQ(parse_formula(f.to_string(), schema), f);
}

TEST(Printer, NumbersRoundTrip) {
  for (double c : {0.1, -0.4, 1e-7, 123456789.125, -0.0, 3.0, 2.5e20}) {
    const auto f = pred(0, "x", Cmp::Less, c);
    const auto back = parse_formula(f.to_string(), kXY);
    EXPECT_EQ(std::get<double>(back.root().constant), c == 0 ? 0.0 : c) << f.to_string();
  }
}

TEST(Parser, AcceptsLooseWhitespaceAndUnparenthesizedOperands) {
  EXPECT_EQ(parse_formula("  not   x<1 ", kXY).to_string(), "not (x < 1)");
  EXPECT_EQ(parse_formula("A[1,2] P[0,1] y>-2", kXY).to_string(), "A[1,2] (P[0,1] (y > -2))");
  EXPECT_EQ(parse_formula("x < 1 and y > 2", kXY).to_string(), "(x < 1) and (y > 2)");
  EXPECT_EQ(parse_formula("true S[0,2] x > 1", kXY).to_string(), "true S[0,2] (x > 1)");
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_formula("P[5,3] (x > 1)", kXY), IntervalError);
  EXPECT_THROW(parse_formula("z > 1", kXY), UnknownVariable);
  EXPECT_THROW(parse_formula("(x > 1) and (y > 2) or (x < 0)", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("(x > 1", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("x >", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("P[1] (x > 1)", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("P[0.5,1] (x > 1)", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("x > ?p", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("", kXY), SyntaxError);
  EXPECT_THROW(parse_formula("true true", kXY), SyntaxError);
  try {
    parse_formula("(x > 1) and (w < 2)", kXY);
    FAIL();
  } catch (const UnknownVariable& e) {
    EXPECT_NE(std::string(e.what()).find('w'), std::string::npos);
  }
  try {
    parse_formula("(x > 1) & (y < 2)", kXY);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 8u);
  }
}

TEST(Formula, OperatorCount) {
  EXPECT_EQ(operator_count(parse_formula("x > 5", kXY)), 0u);
  EXPECT_EQ(operator_count(parse_formula("true", kXY)), 0u);
  EXPECT_EQ(operator_count(parse_formula("P[0,3] (x > 5)", kXY)), 1u);
  const std::vector<std::string> gust{"q", "w"};
  EXPECT_EQ(operator_count(parse_formula("(P[4,10] (q < 0)) and (w < -120)", gust)), 2u);
}

TEST(Formula, IntervalInvariant) {
  EXPECT_THROW(Interval(3, 2), IntervalError);
  EXPECT_THROW(Interval(-1, 2), IntervalError);
  EXPECT_NO_THROW(Interval(2, 2));
}

TEST(Formula, RandomAstRoundTrip) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> schema{"x", "y", "speed_1"};
  for (int i = 0; i < 1000; ++i) {
    const auto f = testing_support::random_formula(rng, schema, 6, 40);
    const auto text = print_formula(f);
    const auto back = parse_formula(text, schema);
    ASSERT_EQ(back, f) << text;
    ASSERT_EQ(print_formula(back), text);
  }
}

TEST(Formula, OrAddsOneOperator) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto f = testing_support::random_formula(rng, kXY, 4);
    const auto g = testing_support::random_formula(rng, kXY, 4);
    EXPECT_EQ(operator_count(f || g), operator_count(f) + operator_count(g) + 1);
  }
}

TEST(Json, FormulaRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto f = testing_support::random_formula(rng, kXY, 5);
    const auto j = formula_to_json(f);
    EXPECT_EQ(formula_from_json(json::parse(j.dump()), kXY), f) << j.dump();
  }
  const auto j = json::parse(R"({"op":"prev","lo":0,"hi":3,"arg":{"op":"pred","var":"x","cmp":">","value":5}})");
  EXPECT_EQ(formula_from_json(j, kXY).to_string(), "P[0,3] (x > 5)");
  EXPECT_THROW(formula_from_json(json::parse(R"({"op":"xor"})"), kXY), ConfigError);
  EXPECT_THROW(formula_from_json(json::parse(R"({"op":"prev","lo":3,"hi":1,"arg":{"op":"true"}})"), kXY), IntervalError);
}

TEST(Json, TemplateRoundTrip) {
  const auto t = parse_template("(P[?a,?b] (x < ?c)) S[1,?d] (y > ?e)", kXY);
  const auto j = template_to_json(t);
  EXPECT_EQ(template_from_json(json::parse(j.dump()), kXY), t);
  EXPECT_EQ(j["lhs"]["arg"]["value"]["param"], "c");
}
