#include "superhedge/winf.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/error.hpp"
#include "superhedge/oneperiod.hpp"

namespace superhedge {

void WinfConfig::validate() const {
  if (!(alpha >= 1.0)) fail(ErrorKind::ConfigError, "density bound alpha must be >= 1");
  if (!(C > 0.0)) fail(ErrorKind::ConfigError, "radius constant must be positive");
  if (!(mesh >= 0.0)) fail(ErrorKind::ConfigError, "mesh must be positive");
  if (radius_override && !(*radius_override >= 0.0)) fail(ErrorKind::ConfigError, "radius must be nonnegative");
}

double radius_schedule(std::size_t N, std::size_t d, const WinfConfig& cfg) {
  cfg.validate();
  if (cfg.radius_override) return *cfg.radius_override;
  if (N < 2) fail(ErrorKind::ParameterError, "radius schedule needs N >= 2");
  if (d < 1) fail(ErrorKind::ParameterError, "dimension must be positive");
  const double n = static_cast<double>(N);
  if (d == 1) return cfg.alpha * std::pow(n, -0.25);
  if (d == 2) return cfg.C * std::pow(std::log(n), 0.75) / std::sqrt(n);
  return cfg.C * std::pow(std::log(n) / n, 1.0 / static_cast<double>(d));
}

WinfResult winf_estimate_radius(const DiscreteMeasure& samples, const PayoffExpr& g, double radius, double mesh) {
  if (samples.size() == 0) fail(ErrorKind::EmptySample, "W-infinity estimate needs samples");
  if (samples.dim() != 1) fail(ErrorKind::UnsupportedDimension, "support fattening is implemented for d = 1 only");
  if (g.arity() != 1) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  if (!(radius >= 0.0)) fail(ErrorKind::ParameterError, "radius must be nonnegative");
  WinfResult res;
  res.radius = radius;
  res.mesh = mesh > 0.0 ? mesh : radius / 20.0;

  // Merge overlapping intervals, then lay the global mesh k*h on each and keep
  // the exact endpoints. A shared lattice keeps grids nested as the radius grows.
  std::vector<std::pair<double, double>> iv;
  for (double r : samples.values_1d()) {
    const double lo = std::max(0.0, r - radius), hi = r + radius;
    if (!iv.empty() && lo <= iv.back().second) iv.back().second = std::max(iv.back().second, hi);
    else iv.emplace_back(lo, hi);
  }
  std::vector<double> xs;
  for (const auto& [lo, hi] : iv) {
    xs.push_back(lo);
    xs.push_back(hi);
    if (res.mesh > 0.0) {
      for (double k = std::ceil(lo / res.mesh); k * res.mesh < hi; k += 1.0) xs.push_back(k * res.mesh);
    }
  }
  for (double r : samples.values_1d()) xs.push_back(r);
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  // 1 is only admissible as an evaluation point, not as support, unless covered.
  bool one_in_support = false;
  for (const auto& [lo, hi] : iv) one_in_support = one_in_support || (lo <= 1.0 && 1.0 <= hi);
  if (!one_in_support) xs.erase(std::find(xs.begin(), xs.end(), 1.0));

  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = g.eval_scalar(xs[i]);
  const auto e = concave_envelope_at(xs, ys, 1.0);
  res.value = e.value;
  res.slope = e.slope;
  res.points = xs.size();
  return res;
}

WinfResult winf_estimate(const DiscreteMeasure& samples, const PayoffExpr& g, const WinfConfig& cfg, std::size_t N) {
  if (samples.size() == 0) fail(ErrorKind::EmptySample, "W-infinity estimate needs samples");
  const double l = radius_schedule(N, samples.dim(), cfg);
  return winf_estimate_radius(samples, g, l, cfg.mesh);
}

}  // namespace superhedge
