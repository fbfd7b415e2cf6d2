#pragma once

#include <cstddef>

#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

/// T periods of i.i.d. returns sharing the support of `samples`; g reads the
/// path in period-major order.
struct MultiperiodProblem {
  std::size_t T = 1;
  DiscreteMeasure samples;
  PayoffExpr payoff;

  void validate() const;
};

/// Backward recursion of one-period plugin prices over sample paths.
double multiperiod_plugin(const MultiperiodProblem& problem);

/// One LP over path probabilities with a martingale constraint per prefix.
double brute_force_oracle(const MultiperiodProblem& problem);

}  // namespace superhedge
