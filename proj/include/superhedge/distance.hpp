#pragma once

#include <limits>
#include <vector>

#include "superhedge/law.hpp"
#include "superhedge/measure.hpp"

namespace superhedge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// W^p between one-dimensional measures via the monotone (quantile) coupling.
/// `p` may be kInfinity, in which case the sup-norm of the quantile difference
/// is returned.
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p = 1.0);

/// Kolmogorov-Smirnov distance sup_r |F_mu(r) - F_nu(r)|.
double ks_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
/// KS distance between an empirical measure and an analytic law.
double ks_distance(const DiscreteMeasure& mu, const Law& law);

/// Hausdorff distance between two finite point sets (Euclidean metric).
double hausdorff_support(const std::vector<Point>& a, const std::vector<Point>& b);

}  // namespace superhedge
