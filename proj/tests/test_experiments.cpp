#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "superhedge/distance.hpp"
#include "superhedge/error.hpp"
#include "superhedge/experiments.hpp"
#include "superhedge/law.hpp"

using namespace superhedge;

TEST_CASE("balayage of a point between two grid nodes") {
  const auto Q = DiscreteMeasure::make_1d({0.5, 1.5}, {0.5, 0.5});
  const auto B = balayage_1d(Q, {0.0, 1.0, 2.0});
  REQUIRE(B.size() == 3);
  CHECK(B.weight(0) == doctest::Approx(0.25));
  CHECK(B.weight(1) == doctest::Approx(0.5));
  CHECK(B.weight(2) == doctest::Approx(0.25));
}

TEST_CASE("balayage preserves mass and barycenter and moves little") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(20), grid(8);
    for (auto& x : xs) x = U(gen);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 3.0 * static_cast<double>(i) / 7.0;
    const auto Q = DiscreteMeasure::uniform_1d(xs);
    const auto B = balayage_1d(Q, grid);
    double mass = 0.0, bq = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < B.size(); ++i) {
      mass += B.weight(i);
      bb += B.weight(i) * B.value(i);
    }
    for (std::size_t i = 0; i < Q.size(); ++i) bq += Q.weight(i) * Q.value(i);
    CHECK(std::abs(mass - 1.0) < 1e-15 * 20);
    CHECK(std::abs(bb - bq) < 1e-12);
    CHECK(wasserstein_1d(Q, B) <= 3.0 / 7.0 + 1e-12);
  }
}

TEST_CASE("balayage rejects bad grids") {
  const auto Q = DiscreteMeasure::uniform_1d({1.0});
  CHECK_THROWS_AS(balayage_1d(Q, {1.0}), Error);
  CHECK_THROWS_AS(balayage_1d(Q, {1.0, 0.5}), Error);
}

TEST_CASE("rate bound for bounded and exponential laws") {
  Modulus lip;
  lip.L = 1.0;
  const auto u = rate_bound(Law::uniform(0.0, 2.0), 1000, lip, true);
  CHECK(u.dN == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)));
  CHECK(u.kappa == doctest::Approx(6.0 * u.dN));
  CHECK(u.tail_term == 0.0);
  CHECK(u.bound == doctest::Approx(u.kappa));

  const auto e = rate_bound(Law::exponential(1.0), 1000, lip, false);
  CHECK(e.tail_term == doctest::Approx(-1.0 / std::log(e.dN)));
  CHECK(e.bound == doctest::Approx(e.modulus_term + e.tail_term));

  CHECK_THROWS_AS(rate_bound(Law::uniform(0.0, 2.0), 5, lip, true), Error);
}

TEST_CASE("modulus kinds") {
  Modulus h;
  h.kind = Modulus::Kind::Holder;
  h.L = 2.0;
  h.gamma = 0.5;
  CHECK(h(0.25) == doctest::Approx(1.0));
  Modulus t;
  t.kind = Modulus::Kind::Table;
  t.table = {{0.0, 0.0}, {1.0, 2.0}};
  CHECK(t(0.5) == doctest::Approx(1.0));
  CHECK(t(3.0) == doctest::Approx(2.0));
}

TEST_CASE("reference price of |r-1| under uniform[0,2] is 1") {
  bool proxy = true;
  CHECK(reference_price(Law::uniform(0.0, 2.0), PayoffExpr::parse("abs(r-1)"), &proxy) == doctest::Approx(1.0));
  CHECK_FALSE(proxy);
  reference_price(Law::exponential(1.0), PayoffExpr::parse("min(r,3)"), &proxy);
  CHECK(proxy);
}

TEST_CASE("fit_slope recovers a line") {
  const auto f = fit_slope({0, 1, 2, 3}, {1, -1, -3, -5});
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.se == doctest::Approx(0.0));
}

TEST_CASE("convergence study: a two-point law gives no gap once both atoms are seen") {
  const auto law = Law::parse("discrete(0.5:1,1.5:1)");
  EstimatorSpec est;
  StudyOptions opt;
  opt.runs = 20;
  opt.threads = 2;
  const auto rep = convergence_study(law, PayoffExpr::parse("abs(r-1)"), {40, 80}, est, opt);
  CHECK(rep.reference == doctest::Approx(0.5));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rep.skipped[i] == 0);
    CHECK(rep.mean[i] == doctest::Approx(0.5));
  }
}

TEST_CASE("convergence study on uniform[0,2] shrinks roughly like 1/N") {
  EstimatorSpec est;
  StudyOptions opt;
  opt.runs = 200;
  opt.threads = 4;
  const auto g = PayoffExpr::parse("abs(r-1)");
  const auto rep = convergence_study(Law::uniform(0.0, 2.0), g, {10, 20, 40, 80, 160, 320}, est, opt);
  CHECK(rep.slope_points == 5);
  CHECK(rep.slope == doctest::Approx(-1.0).epsilon(0.2));
  for (std::size_t i = 0; i < rep.Ns.size(); ++i) CHECK(rep.mean[i] <= 1.0 + 1e-12);

  const auto again = convergence_study(Law::uniform(0.0, 2.0), g, {10, 20, 40, 80, 160, 320}, est, opt);
  CHECK(again.values == rep.values);

  std::ostringstream js;
  write_study_json(js, rep);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["schema"] == 1);
  CHECK(j["grid"].size() == 6);
}

TEST_CASE("robustness: zero shift leaves estimates unchanged") {
  EstimatorSpec est;
  StudyOptions opt;
  opt.runs = 30;
  const auto g = PayoffExpr::parse("abs(r-1)");
  const auto zero = robustness_study(Law::uniform(0.0, 2.0), Perturbation::parse("winf_shift(0)"), g, est, 50, opt);
  CHECK(zero.distance == 0.0);
  CHECK(zero.mean_shift == 0.0);
  const auto shifted =
      robustness_study(Law::uniform(0.0, 2.0), Perturbation::parse("winf_shift(0.01)"), g, est, 50, opt);
  CHECK(shifted.distance > 0.0);
  CHECK_THROWS_AS(Perturbation::parse("shift(1)"), Error);
  CHECK(Perturbation::parse("contaminate(0.1,3)").lambda == doctest::Approx(0.1));
}

TEST_CASE("rolling backtest on a flat series") {
  const auto series = ReturnSeries::from_scalars(std::vector<double>(80, 1.0));
  BacktestConfig cfg;
  cfg.window = 20;
  cfg.smoothing = 5;
  const auto g = PayoffExpr::parse("max(r-1,0)+0.3");
  const auto res = rolling_backtest(series, g, cfg);
  REQUIRE(res.plugin.size() == 61);
  for (std::size_t i = 0; i < res.plugin.size(); ++i) {
    CHECK(res.plugin[i] == doctest::Approx(0.3));
    CHECK(res.wasserstein[i] >= res.plugin[i]);
    CHECK(res.plugin_smoothed[i] == doctest::Approx(0.3));
  }
  CHECK(res.wasserstein[0] - res.plugin[0] == doctest::Approx(2.0 * res.epsilon / 0.05));
}

TEST_CASE("rolling backtest rejects a short series") {
  const auto series = ReturnSeries::from_scalars(std::vector<double>(10, 1.0));
  CHECK_THROWS_AS(rolling_backtest(series, PayoffExpr::parse("r"), BacktestConfig{}), Error);
}
