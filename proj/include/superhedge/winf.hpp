#pragma once

#include <cstddef>
#include <optional>

#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

struct WinfConfig {
  /// Density bound 1/alpha <= rho <= alpha of the true law.
  double alpha = 1.0;
  /// Constant of the d >= 2 radius.
  double C = 1.0;
  /// Discretisation step of the fattened support; 0 means radius / 20.
  double mesh = 0.0;
  std::optional<double> radius_override;

  void validate() const;
};

/// l_N = alpha N^-1/4 (d = 1), C log(N)^{3/4} / N^{1/2} (d = 2),
/// C (log N / N)^{1/d} (d >= 3).
double radius_schedule(std::size_t N, std::size_t d, const WinfConfig& cfg);

struct WinfResult {
  double value = 0.0;
  double radius = 0.0;
  double mesh = 0.0;
  std::size_t points = 0;
  double slope = 0.0;
};

/// Envelope price at 1 over the sample support fattened by the radius.
WinfResult winf_estimate(const DiscreteMeasure& samples, const PayoffExpr& g, const WinfConfig& cfg, std::size_t N);
/// Same with an explicit radius.
WinfResult winf_estimate_radius(const DiscreteMeasure& samples, const PayoffExpr& g, double radius, double mesh = 0.0);

}  // namespace superhedge
