#include "superhedge/oneperiod.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/error.hpp"
#include "superhedge/lp.hpp"

namespace superhedge {

namespace {

using lp::LinearProgram;
using lp::RowSense;
using lp::Sense;

// Rows of e(r_i) - 1: stock coordinates then normalised option payoffs.
std::vector<std::vector<double>> excess_returns(const DiscreteMeasure& mu, const std::vector<OptionQuote>& options) {
  std::vector<std::vector<double>> rows(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    auto& row = rows[i];
    for (double v : a) row.push_back(v - 1.0);
    for (const auto& opt : options) row.push_back(opt.payoff.eval(a) / opt.price - 1.0);
  }
  return rows;
}

void check_options(const DiscreteMeasure& mu, const std::vector<OptionQuote>& options) {
  for (const auto& opt : options) {
    if (!(opt.price > 0.0) || !std::isfinite(opt.price)) fail(ErrorKind::ParameterError, "option price must be positive");
    if (opt.payoff.arity() != mu.dim()) fail(ErrorKind::ShapeError, "option payoff dimension does not match the data");
  }
}

std::vector<double> unit_max_norm(std::vector<double> h) {
  double m = 0.0;
  for (double v : h) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : h) v /= m;
  return h;
}

// Finds H with H.(r_i - 1) >= 0 everywhere and maximal total positive part.
std::vector<double> arbitrage_direction(const std::vector<std::vector<double>>& ex) {
  const std::size_t n = ex.size(), k = ex.empty() ? 0 : ex.front().size();
  LinearProgram prog(k + n, Sense::Maximize);
  for (std::size_t j = 0; j < k; ++j) {
    prog.set_free(j);
    prog.lower[j] = -1.0;
    prog.upper[j] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    prog.objective[k + i] = 1.0;
    prog.upper[k + i] = 1.0;
    std::vector<double> row(k + n, 0.0);
    for (std::size_t j = 0; j < k; ++j) row[j] = ex[i][j];
    row[k + i] = -1.0;
    prog.add_inequality(row, RowSense::GreaterEqual, 0.0);
  }
  const auto sol = lp::solve_lp(prog);
  if (!sol.optimal() || sol.objective <= 1e-12) return {};
  return unit_max_norm(std::vector<double>(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(k)));
}

}  // namespace

const char* to_string(AchievedBy a) {
  switch (a) {
    case AchievedBy::Primal: return "primal";
    case AchievedBy::Dual: return "dual";
    case AchievedBy::Envelope: return "envelope";
  }
  return "?";
}

OptionQuote OptionQuote::parse(const std::string& text, std::size_t dim) {
  const auto at = text.rfind('@');
  if (at == std::string::npos) fail(ErrorKind::ParseError, "option quote must look like 'payoff@price': " + text);
  OptionQuote q;
  q.payoff = PayoffExpr::parse(text.substr(0, at), dim);
  try {
    std::size_t used = 0;
    const std::string p = text.substr(at + 1);
    q.price = std::stod(p, &used);
    if (p.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(p);
  } catch (const std::logic_error&) {
    fail(ErrorKind::ParseError, "bad option price in '" + text + "'");
  }
  if (!(q.price > 0.0)) fail(ErrorKind::ParameterError, "option price must be positive: " + text);
  return q;
}

NaCheck check_na(const DiscreteMeasure& mu) {
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "check_na on an empty measure");
  const std::size_t n = mu.size(), d = mu.dim();
  // variables q_0..q_{n-1}, tau
  LinearProgram prog(n + 1, Sense::Maximize);
  prog.objective[n] = 1.0;
  prog.lower[n] = -kInfinity;
  prog.upper[n] = 1.0;
  prog.add_equality([&] {
    std::vector<double> row(n + 1, 1.0);
    row[n] = 0.0;
    return row;
  }(), 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) row[i] = mu.atom(i)[j];
    prog.add_equality(row, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n + 1, 0.0);
    row[i] = 1.0;
    row[n] = -1.0;
    prog.add_inequality(row, RowSense::GreaterEqual, 0.0);
  }
  const auto sol = lp::solve_lp(prog);
  NaCheck out;
  out.tau = sol.optimal() ? sol.objective : -kInfinity;
  if (sol.optimal() && sol.objective > 1e-10) {
    out.arbitrage_free = true;
    out.martingale_weights.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
  out.arbitrage_direction = arbitrage_direction(excess_returns(mu, {}));
  return out;
}

HedgePlan price_primal(const DiscreteMeasure& mu, const PayoffExpr& g, const std::vector<OptionQuote>& options) {
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "pricing on an empty measure");
  if (g.arity() != mu.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  return price_primal(mu, evaluate_on(g, mu), options);
}

HedgePlan price_primal(const DiscreteMeasure& mu, const std::vector<double>& gv,
                       const std::vector<OptionQuote>& options) {
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "pricing on an empty measure");
  if (gv.size() != mu.size()) fail(ErrorKind::ShapeError, "payoff values do not match the atoms");
  check_options(mu, options);
  const auto ex = excess_returns(mu, options);
  const std::size_t n = mu.size(), k = ex.front().size();

  // x, H_1..H_k
  LinearProgram prog(1 + k, Sense::Minimize);
  prog.objective[0] = 1.0;
  for (std::size_t j = 0; j <= k; ++j) prog.set_free(j);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(1 + k);
    row[0] = 1.0;
    for (std::size_t j = 0; j < k; ++j) row[1 + j] = ex[i][j];
    prog.add_inequality(row, RowSense::GreaterEqual, gv[i]);
  }
  const auto sol = lp::solve_lp(prog);
  if (sol.status == lp::Status::Unbounded) {
    std::vector<double> h(sol.ray.begin() + 1, sol.ray.end());
    fail(ErrorKind::ArbitrageDetected, "superhedging LP is unbounded below: the market admits arbitrage",
         unit_max_norm(std::move(h)));
  }
  if (!sol.optimal()) fail(ErrorKind::SolverStall, "superhedging LP did not reach an optimum");
  const double xstar = sol.objective;

  // Secondary LP: l1-smallest H among (near) optimal strategies.
  LinearProgram sec(1 + 2 * k, Sense::Minimize);
  sec.set_free(0);
  for (std::size_t j = 0; j < k; ++j) sec.objective[1 + j] = sec.objective[1 + k + j] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(1 + 2 * k);
    row[0] = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      row[1 + j] = ex[i][j];
      row[1 + k + j] = -ex[i][j];
    }
    sec.add_inequality(row, RowSense::GreaterEqual, gv[i]);
  }
  sec.upper[0] = xstar + 1e-10 * std::max(1.0, std::abs(xstar));
  const auto s2 = lp::solve_lp(sec);

  HedgePlan plan;
  plan.achieved_by = AchievedBy::Primal;
  plan.strategy.assign(k, 0.0);
  if (s2.optimal()) {
    for (std::size_t j = 0; j < k; ++j) plan.strategy[j] = s2.x[1 + j] - s2.x[1 + k + j];
  } else {
    for (std::size_t j = 0; j < k; ++j) plan.strategy[j] = sol.x[1 + j];
  }
  // The chosen H may need up to 1e-10 relative extra cash; the reported
  // price stays the LP optimum.
  plan.price = xstar;
  plan.dual_weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.dual_weights[i] = std::max(sol.duals[i], 0.0);
  return plan;
}

HedgePlan price_dual(const DiscreteMeasure& mu, const PayoffExpr& g, const std::vector<OptionQuote>& options) {
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "pricing on an empty measure");
  if (g.arity() != mu.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  check_options(mu, options);
  const auto na = check_na(mu);
  if (!na.arbitrage_free) {
    fail(ErrorKind::NAViolation, "no equivalent martingale measure exists on the sample", na.arbitrage_direction);
  }
  const std::size_t n = mu.size(), d = mu.dim(), m = options.size();
  const auto gv = evaluate_on(g, mu);

  LinearProgram prog(n, Sense::Maximize);
  prog.objective = gv;
  prog.add_equality(std::vector<double>(n, 1.0), 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = mu.atom(i)[j];
    prog.add_equality(row, 1.0);
  }
  for (const auto& opt : options) {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = opt.payoff.eval(mu.atom(i)) / opt.price;
    prog.add_equality(row, 1.0);
  }
  const auto sol = lp::solve_lp(prog);
  if (sol.status == lp::Status::Infeasible) {
    fail(ErrorKind::QuoteArbitrage, "option quotes are inconsistent with every martingale measure on the sample");
  }
  if (!sol.optimal()) fail(ErrorKind::SolverStall, "martingale LP did not reach an optimum");

  HedgePlan plan;
  plan.achieved_by = AchievedBy::Dual;
  plan.price = sol.objective;
  plan.dual_weights = sol.x;
  // Shadow prices of the normalised constraints are the hedge positions.
  plan.strategy.resize(d + m);
  for (std::size_t j = 0; j < d + m; ++j) plan.strategy[j] = sol.duals[1 + j];
  return plan;
}

EnvelopePoint concave_envelope_at(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (x.empty()) fail(ErrorKind::EmptySample, "envelope of an empty point set");
  if (x.size() != y.size()) fail(ErrorKind::ShapeError, "envelope abscissae and ordinates differ in length");
  if (at < x.front() || at > x.back()) {
    fail(ErrorKind::ArbitrageDetected, "evaluation point lies outside the support hull",
         {at < x.front() ? -1.0 : 1.0});
  }
  // Monotone chain upper hull.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  EnvelopePoint e;
  if (hull.size() == 1) {
    e.value = y[hull[0]];
    e.left = e.right = hull[0];
    return e;
  }
  auto slope = [&](std::size_t s) {
    const std::size_t a = hull[s], b = hull[s + 1];
    return (y[b] - y[a]) / (x[b] - x[a]);
  };
  std::size_t s = 0;
  while (s + 2 < hull.size() && x[hull[s + 1]] <= at) ++s;
  const std::size_t a = hull[s], b = hull[s + 1];
  if (at == x[a] || at == x[b]) {
    // At a vertex any slope between the adjacent segments supports the hull;
    // report the one closest to zero.
    const std::size_t v = at == x[a] ? s : s + 1;
    const double left = v > 0 ? slope(v - 1) : kInfinity;
    const double right = v + 1 < hull.size() ? slope(v) : -kInfinity;
    e.value = y[hull[v]];
    e.slope = std::clamp(0.0, right, left);
    e.left = e.right = hull[v];
    return e;
  }
  const double w = (at - x[a]) / (x[b] - x[a]);
  e.left = a;
  e.right = b;
  e.left_weight = 1.0 - w;
  e.right_weight = w;
  e.slope = slope(s);
  e.value = (1.0 - w) * y[a] + w * y[b];
  return e;
}

HedgePlan envelope_price_1d(const std::vector<double>& atoms, const std::vector<double>& payoffs, double spot) {
  const auto e = concave_envelope_at(atoms, payoffs, spot);
  HedgePlan plan;
  plan.achieved_by = AchievedBy::Envelope;
  plan.price = e.value;
  plan.strategy = {e.slope};
  plan.dual_weights.assign(atoms.size(), 0.0);
  plan.dual_weights[e.left] += e.left_weight;
  plan.dual_weights[e.right] += e.right_weight;
  return plan;
}

HedgePlan envelope_price_1d(const DiscreteMeasure& mu, const PayoffExpr& g, double spot) {
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "pricing on an empty measure");
  if (mu.dim() != 1) fail(ErrorKind::UnsupportedDimension, "the envelope price needs one-dimensional returns");
  if (g.arity() != 1) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  return envelope_price_1d(mu.values_1d(), evaluate_on(g, mu), spot);
}

HedgeCheck verify_superhedge(const HedgePlan& plan, const DiscreteMeasure& mu, const PayoffExpr& g, double tol,
                             const std::vector<OptionQuote>& options) {
  const auto ex = excess_returns(mu, options);
  HedgeCheck out;
  out.min_slack = kInfinity;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double hedge = 0.0;
    const std::size_t k = std::min(plan.strategy.size(), ex[i].size());
    for (std::size_t j = 0; j < k; ++j) hedge += plan.strategy[j] * ex[i][j];
    const double slack = plan.price + hedge - g.eval(mu.atom(i));
    if (slack < out.min_slack) {
      out.min_slack = slack;
      out.worst_atom = i;
    }
  }
  out.ok = out.min_slack >= -tol;
  return out;
}

}  // namespace superhedge
