#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "superhedge/distance.hpp"
#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"
#include "superhedge/schedule.hpp"

namespace superhedge {

struct AvarHedge {
  double value = 0.0;
  std::vector<double> H;
};

/// inf_H AV@R_alpha(g - H(r - 1)) under mu, optionally with sum_j |H_j| <= box.
AvarHedge avar_hedged(const DiscreteMeasure& mu, const PayoffExpr& g, double alpha,
                      std::optional<double> box = std::nullopt);
/// Same with payoff values already evaluated on the atoms of mu.
AvarHedge avar_hedged(const DiscreteMeasure& mu, const std::vector<double>& payoff_values, double alpha,
                      std::optional<double> box = std::nullopt);

struct BetaRule {
  enum class Kind { ExpSqrt, Fixed, Custom } kind = Kind::ExpSqrt;
  double beta = 0.05;
  std::function<double(std::size_t)> custom;
  double operator()(std::size_t N) const;
};

struct KRule {
  enum class Kind { Power, Fixed, Custom } kind = Kind::Power;
  double gamma = 0.5;
  double k = 10.0;
  std::function<double(double)> custom;
};

/// k = eps^-gamma (or the fixed/custom rule), capped at `cap`.
double k_schedule(double epsilon, const KRule& rule, double cap = kInfinity);

struct WassersteinConfig {
  ScheduleParams schedule;
  ScheduleBranch branch = ScheduleBranch::Iid;
  BetaRule beta;
  KRule k;
  double fixed_radius = 0.0;
  /// l1 bound on H for the upper estimate; defaults to the Lipschitz constant.
  std::optional<double> box;
  /// Declared Lipschitz constant; when absent the payoff audit must supply one.
  std::optional<double> lipschitz;

  void validate() const;
  double epsilon(std::size_t N) const;
  /// Throws ParameterError unless k*eps decreases over the sample sizes.
  void check_decay(const std::vector<std::size_t>& Ns) const;
};

struct WassersteinBounds {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  double k = 0.0;
  double lipschitz = 0.0;
  double box = 0.0;
  std::vector<double> H_lower;
  std::vector<double> H_upper;
  std::vector<std::string> warnings;
};

/// Lipschitz constant used by the estimators: the declared one, else the
/// payoff audit, else LipschitzRequired.
double resolve_lipschitz(const PayoffExpr& g, std::optional<double> declared);

WassersteinBounds estimate_bounds(const DiscreteMeasure& mu, const PayoffExpr& g, const WassersteinConfig& cfg,
                                  std::size_t N);

struct KusuokaMixture {
  std::vector<double> levels;
  std::vector<double> weights;
  void validate() const;
};

struct KusuokaEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  std::vector<double> H;
};

/// Lower: inf_H sum_j w_j AV@R_{alpha_j}(g - H(r-1)) in one LP; upper adds the
/// per-level transport correction to the boxed optimum.
KusuokaEstimate kusuoka_rho_estimate(const DiscreteMeasure& mu, const PayoffExpr& g, const KusuokaMixture& mixture,
                                     const WassersteinConfig& cfg, std::size_t N);

/// The three-point measures nu and Q on {0, 1, 1/eps} that defeat the ball
/// estimator for the square payoff: W1(nu, delta_1) = eps, dQ/dnu <= eps^-1/2.
struct SquarePayoffCounterexample {
  double r = 0.0;
  DiscreteMeasure nu;
  DiscreteMeasure Q;
};
SquarePayoffCounterexample square_payoff_counterexample(double eps);

}  // namespace superhedge
