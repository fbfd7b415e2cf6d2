#include "superhedge/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/error.hpp"
#include "superhedge/lp.hpp"

namespace superhedge {

namespace {

using lp::LinearProgram;
using lp::RowSense;
using lp::Sense;

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::LevelError, "AV@R level must lie in (0, 1]");
}

// Joint program over (x_1..x_m, H, u) for sum_j c_j AV@R_{alpha_j}. H is split
// into positive and negative parts when boxed.
AvarHedge mixed_avar_lp(const DiscreteMeasure& mu, const std::vector<double>& gv, const std::vector<double>& levels,
                        const std::vector<double>& coeffs, std::optional<double> box) {
  const std::size_t n = mu.size(), d = mu.dim(), m = levels.size();
  const bool boxed = box.has_value();
  const std::size_t nh = boxed ? 2 * d : d;
  const std::size_t hx = m, ux = m + nh;
  LinearProgram prog(m + nh + m * n, Sense::Minimize);
  for (std::size_t j = 0; j < m; ++j) {
    prog.set_free(j);
    prog.objective[j] = coeffs[j];
  }
  if (!boxed)
    for (std::size_t j = 0; j < d; ++j) prog.set_free(hx + j);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < n; ++i) prog.objective[ux + l * n + i] = coeffs[l] * mu.weight(i) / levels[l];
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(prog.num_vars(), 0.0);
      row[l] = 1.0;
      row[ux + l * n + i] = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        row[hx + j] = mu.atom(i)[j] - 1.0;
        if (boxed) row[hx + d + j] = -(mu.atom(i)[j] - 1.0);
      }
      prog.add_inequality(row, RowSense::GreaterEqual, gv[i]);
    }
  }
  if (boxed) {
    std::vector<double> row(prog.num_vars(), 0.0);
    for (std::size_t j = 0; j < nh; ++j) row[hx + j] = 1.0;
    prog.add_inequality(row, RowSense::LessEqual, *box);
  }
  const auto sol = lp::solve_lp(prog);
  if (sol.status == lp::Status::Unbounded) {
    std::vector<double> h(d);
    for (std::size_t j = 0; j < d; ++j) h[j] = sol.ray[hx + j] - (boxed ? sol.ray[hx + d + j] : 0.0);
    fail(ErrorKind::Unbounded, "hedged AV@R is unbounded below along the reported strategy direction", h);
  }
  if (!sol.optimal()) fail(ErrorKind::SolverStall, "hedged AV@R program did not reach an optimum");
  AvarHedge out;
  out.value = sol.objective;
  out.H.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.H[j] = sol.x[hx + j] - (boxed ? sol.x[hx + d + j] : 0.0);
  return out;
}

}  // namespace

AvarHedge avar_hedged(const DiscreteMeasure& mu, const std::vector<double>& payoff_values, double alpha,
                      std::optional<double> box) {
  check_level(alpha);
  if (mu.size() == 0) fail(ErrorKind::EmptySample, "hedged AV@R of an empty measure");
  if (payoff_values.size() != mu.size()) fail(ErrorKind::ShapeError, "payoff values do not match the atoms");
  if (box && !(*box >= 0.0)) fail(ErrorKind::ParameterError, "strategy box must be nonnegative");
  return mixed_avar_lp(mu, payoff_values, {alpha}, {1.0}, box);
}

AvarHedge avar_hedged(const DiscreteMeasure& mu, const PayoffExpr& g, double alpha, std::optional<double> box) {
  if (g.arity() != mu.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  return avar_hedged(mu, evaluate_on(g, mu), alpha, box);
}

double BetaRule::operator()(std::size_t N) const {
  switch (kind) {
    case Kind::ExpSqrt: return beta_exp_sqrt(N);
    case Kind::Fixed: return beta;
    case Kind::Custom:
      if (!custom) fail(ErrorKind::ConfigError, "custom beta rule without a sequence");
      return custom(N);
  }
  return beta;
}

double k_schedule(double epsilon, const KRule& rule, double cap) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::ParameterError, "k schedule needs epsilon >= 0");
  double k = 0.0;
  switch (rule.kind) {
    case KRule::Kind::Power:
      if (!(rule.gamma > 0.0 && rule.gamma < 1.0)) fail(ErrorKind::ParameterError, "gamma must lie in (0, 1)");
      k = epsilon == 0.0 ? kInfinity : std::pow(epsilon, -rule.gamma);
      break;
    case KRule::Kind::Fixed: k = rule.k; break;
    case KRule::Kind::Custom:
      if (!rule.custom) fail(ErrorKind::ConfigError, "custom k rule without a function");
      k = rule.custom(epsilon);
      break;
  }
  k = std::min(k, cap);
  if (!(k >= 1.0) || !std::isfinite(k)) {
    fail(ErrorKind::ParameterError, "density bound k must be a finite number >= 1 (got " + std::to_string(k) + ")");
  }
  return k;
}

void WassersteinConfig::validate() const {
  schedule.validate();
  if (!(fixed_radius >= 0.0)) fail(ErrorKind::ParameterError, "fixed radius must be nonnegative");
  if (box && !(*box > 0.0)) fail(ErrorKind::ParameterError, "strategy box must be positive");
  if (lipschitz && !(*lipschitz >= 0.0)) fail(ErrorKind::ParameterError, "Lipschitz constant must be nonnegative");
  if (k.kind == KRule::Kind::Power && !(k.gamma > 0.0 && k.gamma < 1.0))
    fail(ErrorKind::ParameterError, "gamma must lie in (0, 1)");
  if (k.kind == KRule::Kind::Fixed && !(k.k >= 1.0)) fail(ErrorKind::ParameterError, "fixed k must be >= 1");
  if (beta.kind == BetaRule::Kind::Fixed && !(beta.beta > 0.0 && beta.beta < 1.0))
    fail(ErrorKind::ParameterError, "beta must lie in (0, 1)");
}

double WassersteinConfig::epsilon(std::size_t N) const {
  return epsilon_schedule(N, beta(N), schedule, branch) + fixed_radius;
}

void WassersteinConfig::check_decay(const std::vector<std::size_t>& Ns) const {
  if (Ns.size() < 2 || fixed_radius > 0.0) return;
  auto product = [&](std::size_t N) {
    const double e = epsilon(N);
    return k_schedule(e, k, static_cast<double>(N)) * e;
  };
  const auto [lo, hi] = std::minmax_element(Ns.begin(), Ns.end());
  if (!(product(*hi) < product(*lo) * (1.0 - 1e-9))) {
    fail(ErrorKind::ParameterError, "k*epsilon does not decrease over the requested sample sizes");
  }
}

double resolve_lipschitz(const PayoffExpr& g, std::optional<double> declared) {
  if (declared) return *declared;
  if (auto l = g.lipschitz_bound()) return *l;
  fail(ErrorKind::LipschitzRequired,
       "payoff '" + g.to_string() +
           "' is not in the auditable Lipschitz fragment; declare a Lipschitz constant (--lipschitz) or use the "
           "penalty estimator for discontinuous payoffs");
}

WassersteinBounds estimate_bounds(const DiscreteMeasure& mu, const PayoffExpr& g, const WassersteinConfig& cfg,
                                  std::size_t N) {
  cfg.validate();
  if (mu.size() == 0 || N == 0) fail(ErrorKind::EmptySample, "Wasserstein estimate needs samples");
  if (g.arity() != mu.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  WassersteinBounds out;
  out.lipschitz = resolve_lipschitz(g, cfg.lipschitz);
  if (cfg.lipschitz) {
    const double seen = observed_lipschitz(g, mu.points());
    if (seen > out.lipschitz * (1.0 + 1e-9) + 1e-12) {
      out.warnings.push_back("observed slope " + std::to_string(seen) + " on the sample exceeds the declared constant " +
                             std::to_string(out.lipschitz));
    }
  }
  out.box = cfg.box.value_or(out.lipschitz);
  out.epsilon = cfg.epsilon(N);
  out.k = k_schedule(out.epsilon, cfg.k, 1.0 / mu.min_weight());
  const auto gv = evaluate_on(g, mu);
  const double alpha = std::min(1.0, 1.0 / out.k);
  const auto lo = avar_hedged(mu, gv, alpha);
  const auto hi = avar_hedged(mu, gv, alpha, out.box);
  out.lower = lo.value;
  out.H_lower = lo.H;
  out.H_upper = hi.H;
  out.upper = hi.value + (out.lipschitz + out.box) * out.k * out.epsilon;
  return out;
}

void KusuokaMixture::validate() const {
  if (levels.empty() || levels.size() != weights.size())
    fail(ErrorKind::ShapeError, "mixture needs matching nonempty levels and weights");
  double s = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    check_level(levels[j]);
    if (!(weights[j] >= 0.0)) fail(ErrorKind::ParameterError, "mixture weights must be nonnegative");
    s += weights[j];
    for (std::size_t i = 0; i < j; ++i)
      if (levels[i] == levels[j]) fail(ErrorKind::ParameterError, "mixture levels must be distinct");
  }
  if (std::abs(s - 1.0) > 1e-9) fail(ErrorKind::ParameterError, "mixture weights must sum to one");
}

KusuokaEstimate kusuoka_rho_estimate(const DiscreteMeasure& mu, const PayoffExpr& g, const KusuokaMixture& mixture,
                                     const WassersteinConfig& cfg, std::size_t N) {
  mixture.validate();
  cfg.validate();
  if (mu.size() == 0 || N == 0) fail(ErrorKind::EmptySample, "risk measure estimate needs samples");
  if (g.arity() != mu.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  const double L = resolve_lipschitz(g, cfg.lipschitz);
  const double B = cfg.box.value_or(L);
  const auto gv = evaluate_on(g, mu);
  KusuokaEstimate out;
  out.epsilon = cfg.epsilon(N);
  const auto lo = mixed_avar_lp(mu, gv, mixture.levels, mixture.weights, std::nullopt);
  const auto hi = mixed_avar_lp(mu, gv, mixture.levels, mixture.weights, B);
  double spread = 0.0;
  for (std::size_t j = 0; j < mixture.levels.size(); ++j) spread += mixture.weights[j] / mixture.levels[j];
  out.lower = lo.value;
  out.H = lo.H;
  out.upper = hi.value + (L + B) * out.epsilon * spread;
  return out;
}

SquarePayoffCounterexample square_payoff_counterexample(double eps) {
  if (!(eps > 0.0 && eps <= 0.25)) fail(ErrorKind::ParameterError, "counterexample radius must lie in (0, 1/4]");
  SquarePayoffCounterexample c;
  c.r = 1.0 / eps;
  const double r = c.r, s = std::sqrt(eps);
  c.nu = DiscreteMeasure::make_1d({0.0, 1.0, r},
                                  {eps / 2.0, 1.0 - r * eps / (2.0 * (r - 1.0)), eps / (2.0 * (r - 1.0))});
  c.Q = DiscreteMeasure::make_1d({0.0, 1.0, r}, {s / 2.0, 1.0 - r * s / (2.0 * (r - 1.0)), s / (2.0 * (r - 1.0))});
  return c;
}

}  // namespace superhedge
