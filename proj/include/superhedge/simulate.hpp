#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "superhedge/law.hpp"
#include "superhedge/measure.hpp"
#include "superhedge/rng.hpp"

namespace superhedge {

enum class GarchVariant { LGarch, Gjr, EGarch };
enum class ReturnMap { Raw, Gross, GrossClipped };

struct Innovation {
  enum class Kind { StudentT, Normal } kind = Kind::StudentT;
  double df = 5.0;
  /// Parses "t5", "t(5)", "student_t(5)" or "normal".
  static Innovation parse(const std::string& text);
};

/// h_n = omega + beta h_{n-1} + alpha r_{n-1}^2 (+ alpha2 r_{n-1}^2 1{r_{n-1} < 0} for gjr);
/// egarch: log h_n = omega + beta log h_{n-1} + alpha (|eta| - E|eta|) + gamma eta.
/// r_n = eta_n sqrt(h_n) with eta scaled to unit variance.
struct GarchSpec {
  GarchVariant variant = GarchVariant::LGarch;
  double omega = 0.02;
  double alpha = 0.8;
  double beta = 0.1;
  double alpha2 = 0.0;
  double gamma = 0.0;
  Innovation innovation;
  /// Initial variance; <= 0 means the stationary level.
  double h0 = 0.0;
  std::uint64_t seed = 1;
  ReturnMap return_map = ReturnMap::GrossClipped;
  std::size_t burn_in = 1000;

  /// Throws StationarityError naming the violated inequality.
  void validate() const;
  /// Unconditional variance of r (lgarch/gjr), or exp(omega/(1-beta)) for egarch's log level.
  double stationary_variance() const;
};

struct SimulatedSeries {
  ReturnSeries series;
  std::size_t clipped = 0;
};

SimulatedSeries simulate_garch(const GarchSpec& spec, std::size_t N);

/// Consecutive segments sharing one variance recursion; the burn-in of the
/// first segment is applied once. Used for parameter changes mid-sample.
SimulatedSeries simulate_garch_segments(const std::vector<std::pair<GarchSpec, std::size_t>>& segments);

struct IidSpec {
  Law law = Law::uniform(0.0, 2.0);
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

/// Inverse-CDF draws from the law.
ReturnSeries simulate_iid(const IidSpec& spec, std::size_t N);

/// Standard normal and unit-variance innovation draws on a given stream.
double draw_normal(CounterRng& rng);
double draw_innovation(CounterRng& rng, const Innovation& innov);
/// E|eta| of the unit-variance innovation.
double innovation_abs_mean(const Innovation& innov);

}  // namespace superhedge
