#pragma once

#include <cstddef>
#include <optional>

#include "superhedge/law.hpp"

namespace superhedge {

/// Constants feeding the concentration radius ε_N(β).
///
/// `c1`, `c2` are the (unspecified, positive) constants of the exponential
/// concentration bound for W^p; `a`, `c` the exponential moment E[exp(c|r|^a)];
/// `p` the Wasserstein order; `d` the dimension. `q`, `s` are the moment and
/// mixing orders used by the Markov-chain branch, where the radius comes from
/// the moment bound E[W^p(P, P_N)^p] <= kappa_N.
struct ScheduleParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double a = 1.0;
  double c = 1.0;
  double p = 1.0;
  int d = 1;
  double q = 10.0;
  double s = 4.0;
  std::optional<double> kappaN;

  void validate() const;
};

enum class ScheduleBranch { Iid, Markov };

/// Radius ε_N(β) such that W^p(P, P_N) < ε_N(β) with probability >= 1-β.
double epsilon_schedule(std::size_t N, double beta, const ScheduleParams& params,
                        ScheduleBranch branch = ScheduleBranch::Iid);

/// Moment bound κ_N for the Markov branch (constant C taken as params.c1).
double markov_kappa(std::size_t N, const ScheduleParams& params);

/// Default confidence sequence β_N = exp(-sqrt(N)).
double beta_exp_sqrt(std::size_t N);

/// min(1, 2 exp(-2 N eps^2)).
double dkw_bound(std::size_t N, double eps);

/// Interquantile distance κ^N = sup_k F^{-1}(3k d_N) - F^{-1}(3(k-1) d_N ∨ 0+),
/// k = 1..floor(1/(3 d_N)), together with the upper boundary term
/// F^{-1}(1) - F^{-1}(1-d_N) when `bounded` is set.
double kappa_interquantile(const Law& law, double dN, bool bounded);

}  // namespace superhedge
