#include "superhedge/distance.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/error.hpp"

namespace superhedge {

namespace {

void require_1d(const DiscreteMeasure& m, const char* op) {
  if (m.dim() != 1) {
    fail(ErrorKind::UnsupportedDimension, std::string(op) + " supports one-dimensional measures only");
  }
}

double euclid(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
  return std::sqrt(s);
}

std::vector<double> cumulative(const DiscreteMeasure& m) {
  std::vector<double> c(m.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) c[i] = (acc += m.weight(i));
  c.back() = 1.0;
  return c;
}

double quantile_at(const DiscreteMeasure& m, const std::vector<double>& cum, double level) {
  const auto it = std::lower_bound(cum.begin(), cum.end(), level);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), m.size() - 1);
  return m.value(idx);
}

}  // namespace

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require_1d(mu, "wasserstein_1d");
  require_1d(nu, "wasserstein_1d");
  if (!(p >= 1.0)) fail(ErrorKind::ParameterError, "Wasserstein order must be >= 1");

  // Both quantile functions are left-continuous step functions on (0,1];
  // integrate |F^-1_mu - F^-1_nu|^p over the merged breakpoints.
  const auto cm = cumulative(mu);
  const auto cn = cumulative(nu);
  std::vector<double> levels;
  levels.reserve(cm.size() + cn.size() + 1);
  levels.push_back(0.0);
  levels.insert(levels.end(), cm.begin(), cm.end());
  levels.insert(levels.end(), cn.begin(), cn.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double acc = 0.0;
  double sup = 0.0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double len = levels[k] - levels[k - 1];
    // Sub-1e-12 slivers are float drift between equal cumulative weights.
    if (len <= 1e-12) continue;
    const double mid = 0.5 * (levels[k] + levels[k - 1]);
    const double gap = std::abs(quantile_at(mu, cm, mid) - quantile_at(nu, cn, mid));
    if (std::isinf(p)) {
      sup = std::max(sup, gap);
    } else {
      acc += len * std::pow(gap, p);
    }
  }
  return std::isinf(p) ? sup : std::pow(acc, 1.0 / p);
}

double ks_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_1d(mu, "ks_distance");
  require_1d(nu, "ks_distance");
  std::size_t i = 0, j = 0;
  double fm = 0.0, fn = 0.0, sup = 0.0;
  while (i < mu.size() || j < nu.size()) {
    const double xm = i < mu.size() ? mu.value(i) : kInfinity;
    const double xn = j < nu.size() ? nu.value(j) : kInfinity;
    const double x = std::min(xm, xn);
    while (i < mu.size() && mu.value(i) == x) fm += mu.weight(i++);
    while (j < nu.size() && nu.value(j) == x) fn += nu.weight(j++);
    sup = std::max(sup, std::abs(fm - fn));
  }
  return std::min(sup, 1.0);
}

double ks_distance(const DiscreteMeasure& mu, const Law& law) {
  require_1d(mu, "ks_distance");
  if (law.kind() == Law::Kind::Discrete) return ks_distance(mu, *law.atoms());
  // Continuous law: compare against both one-sided limits of the step CDF.
  double below = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double f = law.cdf(mu.value(i));
    const double above = below + mu.weight(i);
    sup = std::max({sup, std::abs(f - below), std::abs(above - f)});
    below = above;
  }
  return std::min(sup, 1.0);
}

double hausdorff_support(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptySample, "hausdorff_support needs nonempty sets");
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = kInfinity;
      for (const auto& y : to) {
        if (x.size() != y.size()) fail(ErrorKind::ShapeError, "points have mixed dimensions");
        best = std::min(best, euclid(x, y));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace superhedge
