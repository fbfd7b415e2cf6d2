#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "superhedge/error.hpp"
#include "superhedge/multiperiod.hpp"
#include "superhedge/oneperiod.hpp"

using namespace superhedge;

namespace {

MultiperiodProblem make(std::vector<double> support, std::size_t T, const std::string& g) {
  return {T, DiscreteMeasure::uniform_1d(support), PayoffExpr::parse(g, 1, T)};
}

}  // namespace

TEST_CASE("reference values") {
  CHECK(brute_force_oracle(make({0.0, 2.0}, 2, "x1*x2")) == doctest::Approx(1.0));
  CHECK(multiperiod_plugin(make({0.0, 2.0}, 2, "x1*x2")) == doctest::Approx(1.0));
  CHECK(brute_force_oracle(make({0.0, 1.0, 2.0}, 2, "pos(1-x2)")) == doctest::Approx(0.5));
  CHECK(multiperiod_plugin(make({0.0, 1.0, 2.0}, 2, "pos(1-x2)")) == doctest::Approx(0.5));
  const auto p = make({0.0, 1.0, 2.0}, 2, "pos(1-x1*x2)");
  CHECK(multiperiod_plugin(p) == doctest::Approx(brute_force_oracle(p)).epsilon(1e-9));
}

TEST_CASE("one period reduces to the plugin price") {
  const auto mu = DiscreteMeasure::uniform_1d({0.3, 0.8, 1.1, 1.9});
  const auto g = PayoffExpr::parse("pos(x1-1.05) + 0.2*abs(x1-0.5)");
  const auto g1 = PayoffExpr::parse("pos(r-1.05) + 0.2*abs(r-0.5)");
  const double v = multiperiod_plugin({1, mu, g});
  CHECK(v == envelope_price_1d(mu, g1).price);
  CHECK(std::abs(v - price_primal(mu, g1).price) <= 1e-12);
}

TEST_CASE("recursion matches the path LP") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 2.2), C(-1.0, 1.0);
  std::uniform_int_distribution<int> nn(2, 5), tt(2, 3);
  int checked = 0;
  while (checked < 30) {
    const std::size_t n = static_cast<std::size_t>(nn(rng)), T = static_cast<std::size_t>(tt(rng));
    std::vector<double> s(n);
    for (auto& v : s) v = U(rng);
    const auto mu = DiscreteMeasure::uniform_1d(s);
    if (!check_na(mu).arbitrage_free) continue;
    std::ostringstream os;
    os.precision(17);
    os << "pos(x1*x2 - " << 1.0 + 0.3 * C(rng) << ") + " << C(rng) << "*abs(x2 - x1) + " << C(rng) << "*x1^2";
    if (T == 3) os << " + " << C(rng) << "*max(x3, x1*x3)";
    const MultiperiodProblem p{T, mu, PayoffExpr::parse(os.str(), 1, T)};
    CHECK(std::abs(multiperiod_plugin(p) - brute_force_oracle(p)) <= 1e-7);
    ++checked;
  }
}

TEST_CASE("separable payoffs add") {
  const auto mu = DiscreteMeasure::uniform_1d({0.2, 0.7, 1.4, 2.1});
  const double a = price_primal(mu, PayoffExpr::parse("pos(1-r)^2")).price;
  const double b = price_primal(mu, PayoffExpr::parse("abs(r-1.3)")).price;
  const double v = multiperiod_plugin({2, mu, PayoffExpr::parse("pos(1-x1)^2 + abs(x2-1.3)", 1, 2)});
  CHECK(std::abs(v - a - b) <= 1e-9);
  const double c = multiperiod_plugin({3, mu, PayoffExpr::parse("abs(x3-1.3)", 1, 3)});
  CHECK(std::abs(c - b) <= 1e-12);
  const double shifted = multiperiod_plugin({2, mu, PayoffExpr::parse("pos(1-x1)^2 + abs(x2-1.3) + 2", 1, 2)});
  CHECK(std::abs(shifted - v - 2.0) <= 1e-12);
}

TEST_CASE("two-dimensional periods use the hedging LP") {
  const auto mu = DiscreteMeasure::uniform({{0.5, 0.5}, {1.5, 0.5}, {1.0, 1.5}, {0.8, 1.2}});
  const MultiperiodProblem p{2, mu, PayoffExpr::parse("pos(x1_1*x2_2 - 1)", 2, 2)};
  CHECK(multiperiod_plugin(p) == doctest::Approx(brute_force_oracle(p)).epsilon(1e-9));
}

TEST_CASE("guards") {
  std::vector<double> many(11);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = 0.2 * static_cast<double>(i);
  try {
    brute_force_oracle(make(many, 4, "x1"));
    FAIL("expected SizeError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeError);
  }
  CHECK_THROWS_AS(multiperiod_plugin(make(many, 6, "x1")), Error);
  try {
    multiperiod_plugin(make({1.5, 2.0}, 2, "x1"));
    FAIL("expected ArbitrageDetected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArbitrageDetected);
  }
  CHECK_THROWS_AS(multiperiod_plugin({2, DiscreteMeasure::uniform_1d({0.0, 2.0}), PayoffExpr::parse("r")}), Error);
}
