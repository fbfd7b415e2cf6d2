#pragma once

#include <span>

namespace superhedge {

/// Average Value-at-Risk of a discrete value distribution at tail mass
/// `alpha` in (0,1]: the mean of the upper alpha-fraction of outcomes, i.e.
/// max E_q[v] over densities dq/dw <= 1/alpha.
double avar_discrete(std::span<const double> values, std::span<const double> weights, double alpha);

}  // namespace superhedge
