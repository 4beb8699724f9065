#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "metricbundle/error.hpp"
#include "metricbundle/profile.hpp"

using namespace metricbundle;
using Kind = ProfileExpr::Kind;

namespace {

ExprError expr_error(std::string_view text) {
  try {
    ProfileExpr::parse(text);
  } catch (const ExprError& e) {
    return e;
  }
  ADD_FAILURE() << "'" << text << "' parsed";
  return ExprError(ErrorCode::Syntax, 0, "");
}

// Taylor series in long double, independent of the library's use of libm.
long double series_exp(long double x) {
  long double sum = 0, term = 1;
  for (int k = 0; k < 50; ++k) {
    sum += term;
    term *= x / (k + 1);
  }
  return sum;
}
long double series_cos(long double x) {
  long double sum = 0, term = 1;
  for (int k = 0; k < 50; ++k) {
    sum += term;
    term *= -x * x / ((2 * k + 1) * (2 * k + 2));
  }
  return sum;
}

// Random expression text paired with a reference evaluator built from the
// same random choices.
struct Gen {
  std::string text;
  std::function<long double(long double)> f;
  std::function<long double(long double)> df;
};

Gen random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  switch (pick(rng)) {
    case 0: {
      const int v = std::uniform_int_distribution<int>(1, 9)(rng);
      const long double c = v / 4.0L;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%g", double(c));
      return {buf, [c](long double) { return c; }, [](long double) { return 0.0L; }};
    }
    case 1:
      return {"t", [](long double t) { return t; }, [](long double) { return 1.0L; }};
    case 2: {
      auto a = random_expr(rng, depth - 1), b = random_expr(rng, depth - 1);
      return {"(" + a.text + " + " + b.text + ")",
              [=](long double t) { return a.f(t) + b.f(t); },
              [=](long double t) { return a.df(t) + b.df(t); }};
    }
    case 3: {
      auto a = random_expr(rng, depth - 1), b = random_expr(rng, depth - 1);
      return {"(" + a.text + " - " + b.text + ")",
              [=](long double t) { return a.f(t) - b.f(t); },
              [=](long double t) { return a.df(t) - b.df(t); }};
    }
    case 4: {
      auto a = random_expr(rng, depth - 1), b = random_expr(rng, depth - 1);
      return {a.text + "*" + b.text, [=](long double t) { return a.f(t) * b.f(t); },
              [=](long double t) { return a.df(t) * b.f(t) + a.f(t) * b.df(t); }};
    }
    case 5: {
      auto a = random_expr(rng, depth - 1);
      return {"sin(" + a.text + ")", [=](long double t) { return std::sin(a.f(t)); },
              [=](long double t) { return std::cos(a.f(t)) * a.df(t); }};
    }
    case 6: {
      auto a = random_expr(rng, depth - 1);
      return {"cos(" + a.text + ")", [=](long double t) { return std::cos(a.f(t)); },
              [=](long double t) { return -std::sin(a.f(t)) * a.df(t); }};
    }
    case 7: {
      auto a = random_expr(rng, depth - 1);
      return {"tanh(" + a.text + ")", [=](long double t) { return std::tanh(a.f(t)); },
              [=](long double t) {
                const long double th = std::tanh(a.f(t));
                return (1 - th * th) * a.df(t);
              }};
    }
    default: {
      auto a = random_expr(rng, depth - 1);
      const int n = std::uniform_int_distribution<int>(2, 3)(rng);
      return {"(" + a.text + ")^" + std::to_string(n),
              [=](long double t) { return std::pow(a.f(t), n); },
              [=](long double t) { return n * std::pow(a.f(t), n - 1) * a.df(t); }};
    }
  }
}

}  // namespace

TEST(ProfileParse, ConstantOne) {
  const auto e = ProfileExpr::parse("1");
  EXPECT_EQ(e.root().kind, Kind::Number);
  EXPECT_EQ(e.eval(123.0), 1.0);
  EXPECT_FALSE(e.depends_on_time());
}

TEST(ProfileParse, ProductOfSine) {
  const auto e = ProfileExpr::parse("0.5*sin(2*t)");
  const auto& r = e.root();
  ASSERT_EQ(r.kind, Kind::Mul);
  EXPECT_EQ(r.lhs->kind, Kind::Number);
  EXPECT_EQ(r.lhs->value, 0.5);
  ASSERT_EQ(r.rhs->kind, Kind::Sin);
  const auto& arg = *r.rhs->lhs;
  ASSERT_EQ(arg.kind, Kind::Mul);
  EXPECT_EQ(arg.lhs->value, 2.0);
  EXPECT_EQ(arg.rhs->kind, Kind::Time);
}

TEST(ProfileParse, PowerIsRightAssociative) {
  const auto e = ProfileExpr::parse("2^3^2");
  for (double t : {0.0, 1.0, -3.5}) EXPECT_EQ(e.eval(t), 512.0);
  EXPECT_EQ(ProfileExpr::parse("-2^2").eval(0), -4.0);
  EXPECT_EQ(ProfileExpr::parse("2^-1").eval(0), 0.5);
}

TEST(ProfileParse, Precedence) {
  EXPECT_EQ(ProfileExpr::parse("1 + 2*3").eval(0), 7.0);
  EXPECT_EQ(ProfileExpr::parse("8/4/2").eval(0), 1.0);
  EXPECT_EQ(ProfileExpr::parse("8 - 4 - 2").eval(0), 2.0);
  EXPECT_EQ(ProfileExpr::parse("(1 + 2)*3").eval(0), 9.0);
  EXPECT_EQ(ProfileExpr::parse("--t").eval(2.0), 2.0);
  EXPECT_EQ(ProfileExpr::parse("1.5e-1 * 2E1").eval(0), 3.0);
}

TEST(ProfileParse, Errors) {
  EXPECT_EQ(expr_error("").code(), ErrorCode::Syntax);
  EXPECT_EQ(expr_error("1 +").code(), ErrorCode::Syntax);
  EXPECT_EQ(expr_error("(t").code(), ErrorCode::Syntax);
  EXPECT_EQ(expr_error("t)").code(), ErrorCode::Syntax);
  EXPECT_EQ(expr_error("2^t").code(), ErrorCode::Syntax);
  EXPECT_EQ(expr_error("1 $ 2").code(), ErrorCode::Syntax);

  const auto f = expr_error("2*log(t)");
  EXPECT_EQ(f.code(), ErrorCode::UnknownFunction);
  EXPECT_EQ(f.offset(), 2u);

  const auto v = expr_error("t + x");
  EXPECT_EQ(v.code(), ErrorCode::UnknownVariable);
  EXPECT_EQ(v.offset(), 4u);
}

TEST(ProfileEval, Examples) {
  EXPECT_EQ(ProfileExpr::parse("t").eval(3.5), 3.5);
  EXPECT_NEAR(ProfileExpr::parse("sin(t)^2 + cos(t)^2").eval(0.7), 1.0, 1e-15);
}

TEST(ProfileEval, AgainstSeriesOracle) {
  const long double ref = series_exp(-1.0L) * series_cos(3.0L);
  const double got = ProfileExpr::parse("exp(-t)*cos(3*t)").eval(1.0);
  EXPECT_NEAR(got, double(ref), 4e-16);
}

TEST(ProfileEval, Errors) {
  auto code = [](std::string_view text, double t) {
    try {
      ProfileExpr::parse(text).eval(t);
    } catch (const ExprError& e) {
      return e.code();
    }
    return ErrorCode::Schema;
  };
  EXPECT_EQ(code("1/t", 0.0), ErrorCode::Eval);
  EXPECT_EQ(code("2^(1/2)", 0.0), ErrorCode::Eval);
  EXPECT_EQ(code("0^-1", 0.0), ErrorCode::Eval);
  EXPECT_EQ(code("exp(t)", 1000.0), ErrorCode::Eval);
  EXPECT_EQ(code("t", std::nan("")), ErrorCode::Eval);
}

TEST(ProfileDerivative, Examples) {
  const double pi = std::numbers::pi;
  EXPECT_EQ(ProfileExpr::parse("3").derivative().eval(1.0), 0.0);
  EXPECT_NEAR(ProfileExpr::parse("sin(t)").derivative().eval(pi), -1.0, 1e-15);
  EXPECT_NEAR(ProfileExpr::parse("t^3").derivative().eval(2.0), 12.0, 1e-14);
  EXPECT_NEAR(ProfileExpr::parse("1/t").derivative().eval(2.0), -0.25, 1e-15);
  EXPECT_NEAR(ProfileExpr::parse("exp(2*t)").derivative().eval(0.0), 2.0, 1e-15);
  EXPECT_NEAR(ProfileExpr::parse("tanh(t)").derivative().eval(0.0), 1.0, 1e-15);
  EXPECT_NEAR(ProfileExpr::parse("t^-2").derivative().eval(1.0), -2.0, 1e-15);
  EXPECT_FALSE(ProfileExpr::parse("cos(2)").derivative().depends_on_time());
}

TEST(ProfilePrint, RoundTripExamples) {
  for (const char* text : {"1", "t", "-t", "-2^2", "2^3^2", "0.5*sin(2*t)", "1-(2-3)",
                           "t/(1+t)", "exp(-t)*cos(3*t)", "(t^2)^3", "1e-300*t"}) {
    const auto e = ProfileExpr::parse(text);
    const auto again = ProfileExpr::parse(e.print());
    EXPECT_TRUE(e == again) << text << " -> " << e.print();
    EXPECT_EQ(again.print(), e.print());
  }
}

TEST(ProfileProperty, RandomExpressions) {
  std::mt19937_64 rng(20241);
  std::uniform_real_distribution<double> time(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const Gen g = random_expr(rng, 4);
    SCOPED_TRACE(g.text);
    const auto e = ProfileExpr::parse(g.text);
    const auto printed = ProfileExpr::parse(e.print());
    EXPECT_TRUE(e == printed);
    const auto de = e.derivative();
    for (int j = 0; j < 3; ++j) {
      const double t = time(rng);
      const long double ref = g.f(t);
      const long double dref = g.df(t);
      EXPECT_NEAR(e.eval(t), double(ref), 1e-12 * (1 + std::fabs(double(ref))));
      EXPECT_EQ(printed.eval(t), e.eval(t));
      EXPECT_NEAR(de.eval(t), double(dref), 1e-11 * (1 + std::fabs(double(dref))));
    }
  }
}

TEST(ProfileConstant, MatchesParsedLiteral) {
  EXPECT_EQ(ProfileExpr::constant(-0.25).eval(0), -0.25);
  EXPECT_TRUE(ProfileExpr::constant(2.0) == ProfileExpr::parse("2"));
  EXPECT_EQ(ProfileExpr().eval(5.0), 0.0);
  EXPECT_EQ(eval_profile(parse_profile("t*t"), 3.0), 9.0);
}
