#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "superhedge/distance.hpp"
#include "superhedge/error.hpp"
#include "superhedge/law.hpp"
#include "superhedge/oneperiod.hpp"
#include "superhedge/penalty.hpp"

using namespace superhedge;

namespace {

// Vertex enumeration of {q : sum q = 1, sum q r = 1, 0 <= q <= cap}: each
// vertex has at most two coordinates strictly inside their bounds.
bool dominated_martingale_exists(const std::vector<double>& r, const std::vector<double>& cap) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (int mask = 0; mask < (1 << n); ++mask) {
        double m0 = 1.0, m1 = 1.0;
        std::vector<double> q(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          q[k] = (mask >> k) & 1 ? cap[k] : 0.0;
          m0 -= q[k];
          m1 -= q[k] * r[k];
        }
        if (i == j) {
          if (std::abs(m0 * r[i] - m1) > 1e-12) continue;
          q[i] = m0;
        } else {
          const double det = r[j] - r[i];
          if (std::abs(det) < 1e-14) continue;
          q[i] = (m0 * r[j] - m1) / det;
          q[j] = (m1 - m0 * r[i]) / det;
        }
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) ok = ok && q[k] >= -1e-12 && q[k] <= cap[k] + 1e-12;
        if (ok) return true;
      }
    }
  }
  return false;
}

DiscreteMeasure draw(std::mt19937_64& rng, const Law& law, std::size_t n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = law.sample(U(rng));
  return from_samples(ReturnSeries::from_scalars(xs));
}

}  // namespace

TEST_CASE("density ratio reference values") {
  const auto s = DiscreteMeasure::uniform_1d({0.0, 1.0, 2.0});
  CHECK(min_density_ratio(DiscreteMeasure::make_1d({0.0, 1.0, 2.0}, {0.1, 0.8, 0.1}), s) == doctest::Approx(1.0));
  CHECK(min_density_ratio(DiscreteMeasure::make_1d({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25}), s) == doctest::Approx(1.0));
  CHECK(min_density_ratio(DiscreteMeasure::dirac({1.5}), s) == kInfinity);
  // Q puts little mass at 2: q_2 = q_0 forces t = q_0 / 0.05 with q_0 as small as allowed by q_1 <= 0.9 t
  const double t = min_density_ratio(DiscreteMeasure::make_1d({0.0, 1.0, 2.0}, {0.05, 0.9, 0.05}), s);
  CHECK(t == doctest::Approx(1.0));
  CHECK(min_density_ratio(DiscreteMeasure::make_1d({0.0, 2.0, 3.0}, {0.5, 0.25, 0.25}),
                          DiscreteMeasure::uniform_1d({0.0, 2.0, 3.0})) >= 1.0);
}

TEST_CASE("density ratio equals one exactly when a dominated martingale exists") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> below(0, 3), above(5, 10);
  std::uniform_real_distribution<double> W(0.05, 1.0);
  int both = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // Mixtures of two-point martingale laws, perturbed on odd trials.
    std::vector<double> r, w;
    for (int k = 0; k < 2; ++k) {
      const double a = below(rng) / 4.0, b = above(rng) / 4.0, lam = W(rng);
      r.push_back(a);
      w.push_back(lam * (b - 1.0) / (b - a));
      r.push_back(b);
      w.push_back(lam * (1.0 - a) / (b - a));
    }
    if (trial % 2) w[0] *= 1.0 + W(rng);
    double tot = 0.0;
    for (double v : w) tot += v;
    for (auto& v : w) v /= tot;
    const auto Q = DiscreteMeasure::make_1d(r, w);
    const auto samples = DiscreteMeasure::uniform_1d(r);
    const bool oracle = dominated_martingale_exists(Q.values_1d(), Q.weights());
    const double t = min_density_ratio(Q, samples);
    CHECK((std::abs(t - 1.0) <= 1e-9) == oracle);
    CHECK(t >= 1.0);
    both += oracle;
  }
  CHECK(both >= 100);
  CHECK(both < 300);
}

TEST_CASE("penalty equals plugin when C covers the payoff and the grid is the sample") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  while (checked < 15) {
    const auto mu = draw(rng, Law::uniform(0.0, 2.0), 12);
    if (!check_na(mu).arbitrage_free) continue;
    const double k = 0.5 + U(rng);
    const auto g = PayoffExpr::parse("min(pos(r-" + std::to_string(k) + "), 1) + 0.5*ind(r<=" +
                                     std::to_string(0.3 + U(rng)) + ")");
    PenaltyConfig cfg;
    cfg.grid = mu.points();
    const auto res = penalty_estimate(mu, g, cfg);
    const double plugin = price_primal(mu, g).price;
    CHECK(res.value >= plugin - 1e-9);
    CHECK(std::abs(res.value - plugin) <= 1e-6);
    ++checked;
  }
}

TEST_CASE("constant payoff and monotonicity in the penalty weight") {
  std::mt19937_64 rng(5);
  const auto mu = draw(rng, Law::exponential(1.0), 15);
  PenaltyConfig cfg;
  cfg.C = 0.3;
  CHECK(penalty_estimate(mu, PayoffExpr::parse("0.7"), cfg).value == doctest::Approx(0.7));
  const auto g = PayoffExpr::parse("ind(r<=0.5)");
  double prev = kInfinity;
  for (double C : {0.05, 0.2, 1.0, 3.0}) {
    cfg.C = C;
    const auto res = penalty_estimate(mu, g, cfg);
    CHECK(res.value <= prev + 1e-9);
    CHECK(res.value >= envelope_price_1d(mu, g).price - 1e-9);
    prev = res.value;
  }
}

TEST_CASE("enriched grid dominates the plugin for an indicator") {
  std::mt19937_64 rng(6);
  const auto g = PayoffExpr::parse("ind(r<=0.5)");
  for (std::size_t N : {10, 40}) {
    const auto mu = draw(rng, Law::exponential(1.0), N);
    if (!check_na(mu).arbitrage_free) continue;
    PenaltyConfig cfg;
    cfg.auto_points = 20;
    cfg.threads = 2;
    const auto res = penalty_estimate(mu, g, cfg);
    CHECK(res.value >= envelope_price_1d(mu, g).price - 1e-9);
    CHECK(res.value <= 1.0 + 1e-9);
    CHECK_FALSE(res.profile.empty());
  }
}

TEST_CASE("penalty configuration errors") {
  const auto mu = DiscreteMeasure::uniform_1d({0.5, 1.5});
  PenaltyConfig cfg;
  cfg.grid = {{0.5}, {1.0}};
  CHECK_THROWS_AS(penalty_estimate(mu, PayoffExpr::parse("r"), cfg), Error);
  try {
    penalty_estimate(DiscreteMeasure::uniform_1d({1.5, 2.0}), PayoffExpr::parse("r"), PenaltyConfig{});
    FAIL("expected ArbitrageDetected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArbitrageDetected);
  }
  cfg.t_max = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
