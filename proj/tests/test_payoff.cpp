#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "superhedge/error.hpp"
#include "superhedge/payoff.hpp"

using namespace superhedge;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::DataError;
}

}  // namespace

TEST_CASE("basic payoffs") {
  CHECK(PayoffExpr::parse("pos(r-2)").eval_scalar(3.0) == 1.0);
  CHECK(PayoffExpr::parse("abs(r-1)").eval_scalar(0.0) == 1.0);
  const auto ind = PayoffExpr::parse("ind(r<=0.5)");
  CHECK(ind.eval_scalar(0.5) == 1.0);
  CHECK(ind.eval_scalar(0.51) == 0.0);
  CHECK(PayoffExpr::parse("min(abs(r-1),1)").eval_scalar(5.0) == 1.0);
  const auto mp = PayoffExpr::parse("pos(x1*x2-1)", 1, 2);
  CHECK(mp(std::vector<double>{2.0, 1.0}) == 1.0);
  CHECK(PayoffExpr::parse("|r - 3|").eval_scalar(1.0) == 2.0);
  CHECK(PayoffExpr::parse("-r^2").eval_scalar(3.0) == -9.0);
  CHECK(PayoffExpr::parse("2^2").eval_scalar(0.0) == 4.0);
  CHECK(PayoffExpr::parse("r1 + 2*r2", 2)(std::vector<double>{1.0, 3.0}) == 7.0);
  CHECK(PayoffExpr::parse("x2_1 - x1_2", 2, 2)(std::vector<double>{0.0, 1.0, 5.0, 0.0}) == 4.0);
}

TEST_CASE("piecewise payoff with guarded square root") {
  const auto g = PayoffExpr::parse("(1-r)*ind(r<=1) - sqrt(r-1)*ind(r>1)");
  CHECK(g.eval_scalar(2.0) == -1.0);
  CHECK(g.eval_scalar(0.0) == 1.0);
  CHECK(g.eval_scalar(0.5) == 0.5);
  CHECK_FALSE(g.warnings().empty());
  CHECK(kind_of([] { PayoffExpr::parse("sqrt(r-1)").eval_scalar(0.0); }) == ErrorKind::EvalError);
}

TEST_CASE("evaluation errors name the subexpression") {
  try {
    PayoffExpr::parse("1 + log(r)").eval_scalar(0.0);
    FAIL("expected EvalError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvalError);
    CHECK(std::string(e.what()).find("log(r)") != std::string::npos);
  }
  CHECK(kind_of([] { PayoffExpr::parse("1/(r-1)").eval_scalar(1.0); }) == ErrorKind::EvalError);
  CHECK(kind_of([] { PayoffExpr::parse("r").eval(std::vector<double>{1.0, 2.0}); }) == ErrorKind::ShapeError);
}

TEST_CASE("parse errors") {
  CHECK(kind_of([] { PayoffExpr::parse(""); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("r +"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("y"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("r3", 2); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("foo(r)"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("abs(r, 1)"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("max(r)"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { PayoffExpr::parse("ind(r)"); }) == ErrorKind::ParseError);
  try {
    PayoffExpr::parse("r * * 2");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("pretty printing is a fixed point") {
  const std::vector<std::string> corpus = {
      "pos(r-2)", "abs(r-1)", "ind(r<=0.5)", "(1-r)*ind(r<=1) - sqrt(r-1)*ind(r>1)", "min(abs(r-1),1)",
      "r - (r - 1)", "r - r - 1", "-(r+1)", "--r", "(-r)^2", "-r^2", "(r^2)^3", "2*(r+1)/3", "r/(2*r)",
      "r/2/3", "r/(2/3)", "max(r, 1, 2*r, -r)", "exp(-r)*log(r+1)", "|r-1| + |r+1|", "1e-3*r",
      "0.1 + 0.2", "pos(1-r)^2", "ind(r - 1 == 0)", "r*(r*(r+1))", "((((r))))", "sqrt(abs(r))",
      "1/(1+exp(-(r-1)))", "min(max(r,0.5),1.5)", "-(-(r))", "3.25e10 - r*1.5e-7"};
  REQUIRE(corpus.size() == 30);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (const auto& text : corpus) {
    CAPTURE(text);
    const auto a = PayoffExpr::parse(text);
    const auto b = PayoffExpr::parse(a.to_string());
    CHECK(b.to_string() == a.to_string());
    for (int i = 0; i < 5; ++i) {
      const double r = U(rng);
      CHECK(a.eval_scalar(r) == b.eval_scalar(r));
    }
  }
}

TEST_CASE("Lipschitz audit bounds observed slopes") {
  const std::vector<std::pair<std::string, std::size_t>> exprs = {
      {"pos(r-2)", 1}, {"abs(r-1)", 1}, {"min(abs(r-1),1)", 1}, {"3*r - max(r, 2*r - 1)", 1},
      {"pos(r1 - r2) + abs(r2 - 1)/4", 2}, {"max(r1, -r2, 0.5*r3)", 3}, {"-2*pos(1-r) + 7", 1}};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 4.0);
  for (const auto& [text, d] : exprs) {
    CAPTURE(text);
    const auto g = PayoffExpr::parse(text, d);
    const auto L = g.lipschitz_bound();
    REQUIRE(L.has_value());
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      std::vector<Point> pair(2, Point(d));
      for (auto& p : pair)
        for (auto& v : p) v = U(rng);
      worst = std::max(worst, observed_lipschitz(g, pair));
    }
    CHECK(worst <= *L + 1e-12);
  }
  CHECK(PayoffExpr::parse("pos(r-2)").lipschitz_bound() == 1.0);
  CHECK(PayoffExpr::parse("2*abs(r-1) + 5").lipschitz_bound() == 2.0);
  CHECK_FALSE(PayoffExpr::parse("r*r").lipschitz_bound().has_value());
  CHECK_FALSE(PayoffExpr::parse("sqrt(r)").lipschitz_bound().has_value());
}

TEST_CASE("evaluate on a measure") {
  const auto mu = DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0});
  const auto v = evaluate_on(PayoffExpr::parse("pos(1-r)"), mu);
  CHECK(v == std::vector<double>{1.0, 0.0, 0.0});
}
