#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

/// A traded claim with payoff f(r) quoted today at `price` (> 0).
struct OptionQuote {
  PayoffExpr payoff;
  double price = 1.0;

  /// Parses "expr@price".
  static OptionQuote parse(const std::string& text, std::size_t dim = 1);
};

enum class AchievedBy { Primal, Dual, Envelope };
const char* to_string(AchievedBy a);

struct HedgePlan {
  double price = 0.0;
  /// Positions in the d stocks followed by one position per option, each in
  /// units of the normalised return f(r)/f0.
  std::vector<double> strategy;
  /// Martingale weights, aligned with the atoms of the priced measure.
  std::vector<double> dual_weights;
  AchievedBy achieved_by = AchievedBy::Primal;
};

struct NaCheck {
  bool arbitrage_free = false;
  /// Optimal min_i q_i of the check LP; -inf when no martingale measure exists.
  double tau = 0.0;
  /// Strictly positive martingale weights when arbitrage free.
  std::vector<double> martingale_weights;
  /// Direction H with H(r_i - 1) >= 0 on every atom, strict somewhere,
  /// scaled to unit max-norm.
  std::vector<double> arbitrage_direction;
};

NaCheck check_na(const DiscreteMeasure& mu);

/// min x s.t. x + H(e(r_i) - 1) >= g(r_i); among optimal H the l1-smallest.
HedgePlan price_primal(const DiscreteMeasure& mu, const PayoffExpr& g,
                       const std::vector<OptionQuote>& options = {});
/// Same with g already evaluated on the atoms.
HedgePlan price_primal(const DiscreteMeasure& mu, const std::vector<double>& payoff_values,
                       const std::vector<OptionQuote>& options = {});

/// max E_q g over martingale weights on the atoms that also reprice the options.
HedgePlan price_dual(const DiscreteMeasure& mu, const PayoffExpr& g,
                     const std::vector<OptionQuote>& options = {});

/// Upper concave envelope of (x_i, y_i) at `at`, x sorted strictly increasing.
struct EnvelopePoint {
  double value = 0.0;
  double slope = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double left_weight = 1.0;
  double right_weight = 0.0;
};
EnvelopePoint concave_envelope_at(const std::vector<double>& x, const std::vector<double>& y, double at);

/// Same as concave_envelope_at on atoms of a 1-D measure; `spot` defaults to 1.
HedgePlan envelope_price_1d(const DiscreteMeasure& mu, const PayoffExpr& g, double spot = 1.0);
HedgePlan envelope_price_1d(const std::vector<double>& atoms, const std::vector<double>& payoffs, double spot = 1.0);

struct HedgeCheck {
  bool ok = false;
  double min_slack = 0.0;
  std::size_t worst_atom = 0;
};

/// Checks x + H(r_i - 1) >= g(r_i) - tol on every atom. Option positions are
/// ignored unless `options` is supplied.
HedgeCheck verify_superhedge(const HedgePlan& plan, const DiscreteMeasure& mu, const PayoffExpr& g, double tol = 1e-8,
                             const std::vector<OptionQuote>& options = {});

}  // namespace superhedge
