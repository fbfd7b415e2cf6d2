#include <doctest.h>

#include <cmath>

#include "superhedge/error.hpp"
#include "superhedge/simulate.hpp"

using namespace superhedge;

namespace {

double mean_square(const ReturnSeries& s) {
  double m = 0.0;
  for (const auto& o : s.observations) m += o[0] * o[0];
  return m / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("counter generator") {
  CounterRng a(7, 0), b(7, 0), c(7, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  CounterRng u(1);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    CHECK_UNARY(v > 0.0 && v < 1.0);
    s += v;
  }
  CHECK(s / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("innovations have unit variance") {
  for (const auto& in : {Innovation::parse("t5"), Innovation::parse("normal"), Innovation::parse("t(8)")}) {
    CounterRng rng(11);
    const int n = 400000;
    double s = 0.0, a = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = draw_innovation(rng, in);
      s += e * e;
      a += std::abs(e);
    }
    CHECK(s / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(a / n == doctest::Approx(innovation_abs_mean(in)).epsilon(0.01));
  }
  CHECK_THROWS_AS(Innovation::parse("t2"), Error);
  CHECK_THROWS_AS(Innovation::parse("cauchy"), Error);
}

TEST_CASE("garch moments") {
  // alpha = beta = 0: raw returns are omega-scaled innovations
  GarchSpec white;
  white.alpha = white.beta = 0.0;
  white.return_map = ReturnMap::Raw;
  white.seed = 3;
  const auto w = simulate_garch(white, 1000000).series;
  double m4 = 0.0;
  for (const auto& o : w.observations) m4 += std::pow(o[0], 4);
  m4 /= static_cast<double>(w.size());
  const double var = mean_square(w);
  const double se = std::sqrt((m4 - var * var) / static_cast<double>(w.size()));
  CHECK(std::abs(var - 0.02) <= 3.0 * se);

  // finite fourth moment regime: omega/(1 - alpha - beta) = 0.05
  GarchSpec light;
  light.alpha = 0.3;
  light.beta = 0.3;
  light.innovation = Innovation::parse("normal");
  light.return_map = ReturnMap::Raw;
  CHECK(mean_square(simulate_garch(light, 1000000).series) == doctest::Approx(0.05).epsilon(0.03));
}

TEST_CASE("determinism, variants and return maps") {
  GarchSpec s;
  s.seed = 99;
  const auto a = simulate_garch(s, 500);
  const auto b = simulate_garch(s, 500);
  CHECK(a.series.observations == b.series.observations);
  for (const auto& o : a.series.observations) CHECK(o[0] >= 0.0);

  GarchSpec g = s;
  g.variant = GarchVariant::Gjr;
  g.alpha2 = 0.0;
  CHECK(simulate_garch(g, 500).series.observations == a.series.observations);

  GarchSpec e = s;
  e.variant = GarchVariant::EGarch;
  e.omega = -0.1;
  e.beta = 0.9;
  e.alpha = 0.1;
  e.gamma = -0.05;
  e.return_map = ReturnMap::Raw;
  const auto es = simulate_garch(e, 200000).series;
  CHECK(std::isfinite(mean_square(es)));

  GarchSpec wild = s;
  wild.omega = 2.0;
  wild.alpha = 0.5;
  wild.beta = 0.3;
  const auto clipped = simulate_garch(wild, 2000);
  CHECK(clipped.clipped > 0);
  wild.return_map = ReturnMap::Gross;
  CHECK_THROWS_AS(simulate_garch(wild, 2000), Error);
}

TEST_CASE("stationarity is enforced") {
  GarchSpec s;
  s.alpha = 0.8;
  s.beta = 0.25;
  try {
    simulate_garch(s, 10);
    FAIL("expected StationarityError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StationarityError);
    CHECK(std::string(e.what()).find("beta + alpha < 1") != std::string::npos);
  }
  s.variant = GarchVariant::Gjr;
  s.beta = 0.1;
  s.alpha2 = 0.3;
  CHECK_THROWS_AS(simulate_garch(s, 10), Error);
  s.variant = GarchVariant::EGarch;
  s.beta = 1.0;
  CHECK_THROWS_AS(simulate_garch(s, 10), Error);
}

TEST_CASE("iid laws") {
  IidSpec u;
  u.law = Law::uniform(0.0, 2.0);
  const auto x = simulate_iid(u, 100000);
  double m = 0.0;
  for (const auto& o : x.observations) m += o[0];
  m /= 100000.0;
  CHECK(std::abs(m - 1.0) <= 3.0 * std::sqrt(1.0 / 3.0 / 100000.0));

  // expected maximum of N exponentials is the harmonic number H_N
  IidSpec ex;
  ex.law = Law::exponential(1.0);
  const std::size_t N = 100, runs = 4000;
  double mx = 0.0, mx2 = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    ex.stream = r;
    double best = 0.0;
    for (const auto& o : simulate_iid(ex, N).observations) best = std::max(best, o[0]);
    mx += best;
    mx2 += best * best;
  }
  mx /= runs;
  const double sd = std::sqrt(mx2 / runs - mx * mx);
  double H = 0.0;
  for (std::size_t k = 1; k <= N; ++k) H += 1.0 / static_cast<double>(k);
  CHECK(std::abs(mx - H) <= 3.0 * sd / std::sqrt(static_cast<double>(runs)));

  IidSpec d;
  d.law = Law::parse("discrete(0:1,1:1,2:1)");
  std::vector<double> freq(3, 0.0);
  for (const auto& o : simulate_iid(d, 30000).observations) freq[static_cast<std::size_t>(o[0])] += 1.0 / 30000.0;
  for (double f : freq) CHECK(f == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}
