#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

struct PenaltyConfig {
  /// Penalty weight C_N; defaults to sup |g| over the grid.
  std::optional<double> C;
  /// Candidate support. Empty: samples plus `auto_points` equispaced points on
  /// [0, 1.5 * max sample] (one-dimensional data only).
  std::vector<Point> grid;
  std::size_t auto_points = 50;
  /// Upper end of the density-ratio search; 0 means 10 * grid size.
  double t_max = 0.0;
  std::size_t t_points = 64;
  std::size_t refine_rounds = 3;
  std::size_t threads = 1;

  void validate() const;
};

/// min t such that some martingale q on the sample atoms has q_i <= t Q(r_i);
/// +inf when no such q exists.
double min_density_ratio(const DiscreteMeasure& Q, const DiscreteMeasure& samples);

struct PenaltyResult {
  double value = 0.0;
  double t = 1.0;
  double C = 0.0;
  std::vector<Point> grid;
  std::vector<double> Q;
  /// (t, penalised value) for every t evaluated.
  std::vector<std::pair<double, double>> profile;
};

PenaltyResult penalty_estimate(const DiscreteMeasure& samples, const PayoffExpr& g, const PenaltyConfig& cfg);

}  // namespace superhedge
