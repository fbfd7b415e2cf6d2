#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "superhedge/error.hpp"
#include "superhedge/oneperiod.hpp"

using namespace superhedge;

namespace {

// Random payoff in d variables built from the Lipschitz fragment plus a square.
PayoffExpr random_payoff(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::ostringstream os;
  os.precision(17);
  auto var = [&](std::size_t j) { return d == 1 ? std::string("r") : "r" + std::to_string(j + 1); };
  os << "pos(";
  for (std::size_t j = 0; j < d; ++j) os << U(rng) << "*" << var(j) << " + ";
  os << U(rng) << ") + " << U(rng) << "*abs(" << var(0) << " - " << 1.0 + 0.5 * U(rng) << ") + " << U(rng) << "*"
     << var(d - 1) << "^2";
  return PayoffExpr::parse(os.str(), d);
}

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> U(0.0, 2.0), W(0.1, 1.0);
  std::vector<Point> pts(n, Point(d));
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : pts[i]) v = U(rng);
    w[i] = W(rng);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return DiscreteMeasure::make(pts, w);
}

}  // namespace

TEST_CASE("no-arbitrage check") {
  const auto a = check_na(DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0}));
  CHECK(a.arbitrage_free);
  REQUIRE(a.martingale_weights.size() == 3);
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.martingale_weights[i] > 0.0);
    s += a.martingale_weights[i];
    m += a.martingale_weights[i] * static_cast<double>(i);
  }
  CHECK(s == doctest::Approx(1.0));
  CHECK(m == doctest::Approx(1.0));

  const auto b = check_na(DiscreteMeasure::uniform_1d({2.0, 3.0}));
  CHECK_FALSE(b.arbitrage_free);
  REQUIRE(b.arbitrage_direction.size() == 1);
  CHECK(b.arbitrage_direction[0] == doctest::Approx(1.0));

  CHECK(check_na(DiscreteMeasure::dirac({1.0})).arbitrage_free);
  // 1 on the boundary of the hull: weakly attainable, still an arbitrage
  const auto c = check_na(DiscreteMeasure::uniform_1d({1.0, 2.0}));
  CHECK_FALSE(c.arbitrage_free);
  CHECK(c.arbitrage_direction[0] > 0.0);
}

TEST_CASE("put on the three-point market") {
  const auto mu = DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0});
  const auto g = PayoffExpr::parse("pos(1-r)");
  const auto p = price_primal(mu, g);
  CHECK(p.price == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(p.strategy.size() == 1);
  CHECK(p.strategy[0] == doctest::Approx(-0.5));
  CHECK(verify_superhedge(p, mu, g).ok);

  const auto q = price_dual(mu, g);
  CHECK(q.price == doctest::Approx(0.5));
  CHECK(q.dual_weights[0] == doctest::Approx(0.5));
  CHECK(std::abs(q.dual_weights[1]) < 1e-12);
  CHECK(q.dual_weights[2] == doctest::Approx(0.5));

  const auto e = envelope_price_1d(mu, g);
  CHECK(e.price == doctest::Approx(0.5));
  CHECK(e.strategy[0] == doctest::Approx(-0.5));
  CHECK(e.dual_weights[0] == doctest::Approx(0.5));
  CHECK(e.dual_weights[2] == doctest::Approx(0.5));
}

TEST_CASE("affine payoffs replicate") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto mu = random_measure(rng, 8, 1);
    if (!check_na(mu).arbitrage_free) continue;
    const auto p = price_primal(mu, PayoffExpr::parse("0.7*(r-1) + 2.5"));
    CHECK(p.price == doctest::Approx(2.5));
    CHECK(p.strategy[0] == doctest::Approx(0.7));
  }
}

TEST_CASE("an option quote pins the martingale measure") {
  const auto mu = DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0});
  const std::vector<OptionQuote> opts = {OptionQuote::parse("pos(1-r)@0.5")};
  const auto p = price_primal(mu, PayoffExpr::parse("pos(r-1)"), opts);
  CHECK(p.price == doctest::Approx(0.5));
  CHECK(p.strategy.size() == 2);
  const auto q = price_dual(mu, PayoffExpr::parse("pos(r-1)"), opts);
  CHECK(q.price == doctest::Approx(0.5));
  CHECK(q.dual_weights[0] == doctest::Approx(0.5));
  CHECK(q.dual_weights[2] == doctest::Approx(0.5));
  CHECK(verify_superhedge(p, mu, PayoffExpr::parse("pos(r-1)"), 1e-8, opts).ok);

  // A put quoted above any martingale value cannot be repriced.
  try {
    price_dual(mu, PayoffExpr::parse("r"), {OptionQuote::parse("pos(1-r)@0.9")});
    FAIL("expected QuoteArbitrage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QuoteArbitrage);
  }
  CHECK_THROWS_AS(OptionQuote::parse("pos(1-r)"), Error);
  CHECK_THROWS_AS(OptionQuote::parse("pos(1-r)@-1"), Error);
}

TEST_CASE("arbitrage is reported by every pricing path") {
  const auto mu = DiscreteMeasure::uniform_1d({2.0, 3.0});
  const auto g = PayoffExpr::parse("r");
  try {
    price_primal(mu, g);
    FAIL("expected ArbitrageDetected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArbitrageDetected);
    REQUIRE(e.witness().size() == 1);
    CHECK(e.witness()[0] > 0.0);
  }
  try {
    price_dual(mu, g);
    FAIL("expected NAViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NAViolation);
  }
  try {
    envelope_price_1d(mu, g);
    FAIL("expected ArbitrageDetected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArbitrageDetected);
  }
}

TEST_CASE("degenerate and concave cases") {
  const auto g = PayoffExpr::parse("-(r-1)^2");
  const auto mu = DiscreteMeasure::uniform_1d({0.2, 0.7, 1.0, 1.6});
  CHECK(envelope_price_1d(mu, g).price == doctest::Approx(0.0));
  CHECK(price_primal(mu, g).price == doctest::Approx(0.0).epsilon(1e-9));
  const auto delta = DiscreteMeasure::dirac({1.0});
  const auto q = price_dual(delta, PayoffExpr::parse("pos(r-0.5)"));
  CHECK(q.price == doctest::Approx(0.5));
  CHECK(q.dual_weights[0] == doctest::Approx(1.0));
  CHECK(envelope_price_1d(delta, PayoffExpr::parse("pos(r-0.5)")).price == doctest::Approx(0.5));
}

TEST_CASE("strong duality on random arbitrage-free markets") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> nat(2, 20), dim(1, 3);
  int checked = 0;
  for (int t = 0; checked < 200; ++t) {
    const std::size_t d = static_cast<std::size_t>(dim(rng));
    const auto mu = random_measure(rng, static_cast<std::size_t>(nat(rng)), d);
    if (!check_na(mu).arbitrage_free) continue;
    const auto g = random_payoff(rng, d);
    const auto p = price_primal(mu, g);
    const auto q = price_dual(mu, g);
    CHECK(std::abs(p.price - q.price) <= 1e-7);
    CHECK(verify_superhedge(p, mu, g).ok);
    CHECK(verify_superhedge(q, mu, g).ok);
    // dual weights form a martingale measure
    double s = 0.0;
    Point m(d, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(q.dual_weights[i] >= -1e-12);
      s += q.dual_weights[i];
      for (std::size_t j = 0; j < d; ++j) m[j] += q.dual_weights[i] * mu.atom(i)[j];
    }
    CHECK(std::abs(s - 1.0) <= 1e-8);
    for (double v : m) CHECK(std::abs(v - 1.0) <= 1e-8);
    // cash invariance and the stock quoted as a redundant option
    const auto shifted = PayoffExpr::parse("(" + g.to_string() + ") + 3", d);
    CHECK(std::abs(price_primal(mu, shifted).price - p.price - 3.0) <= 1e-9);
    const std::string stock = d == 1 ? "r" : "r1";
    const auto redundant = price_primal(mu, g, {OptionQuote::parse(stock + "@1", d)});
    CHECK(std::abs(redundant.price - p.price) <= 1e-9);
    ++checked;
  }
}

TEST_CASE("envelope agrees with the hedging LP in one dimension") {
  std::mt19937_64 rng(9);
  int checked = 0;
  while (checked < 50) {
    const auto mu = random_measure(rng, 12, 1);
    if (!check_na(mu).arbitrage_free) continue;
    const auto g = random_payoff(rng, 1);
    const auto e = envelope_price_1d(mu, g);
    const auto p = price_primal(mu, g);
    CHECK(std::abs(e.price - p.price) <= 1e-9);
    CHECK(verify_superhedge(e, mu, g).ok);
    ++checked;
  }
}

TEST_CASE("prices increase along nested samples") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 2.5);
  const auto g = PayoffExpr::parse("pos(r-1.2) + 0.3*abs(r-0.6)");
  std::vector<double> pts = {0.5, 1.5};
  double prev = envelope_price_1d(DiscreteMeasure::uniform_1d(pts), g).price;
  for (int i = 0; i < 60; ++i) {
    pts.push_back(U(rng));
    const double now = envelope_price_1d(DiscreteMeasure::uniform_1d(pts), g).price;
    CHECK(now >= prev - 1e-10);
    prev = now;
  }
}

TEST_CASE("verification reports the shortfall") {
  const auto mu = DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0});
  const auto g = PayoffExpr::parse("pos(1-r)");
  auto p = price_primal(mu, g);
  p.price -= 0.01;
  const auto c = verify_superhedge(p, mu, g);
  CHECK_FALSE(c.ok);
  CHECK(c.min_slack == doctest::Approx(-0.01));
}
