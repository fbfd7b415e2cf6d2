#include "superhedge/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "superhedge/error.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/parallel.hpp"

namespace superhedge {

namespace {

using lp::LinearProgram;
using lp::RowSense;
using lp::Sense;

struct TValue {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> Q;
};

// max sum_a Q_a g_a over martingale Q on the grid that dominate, up to the
// factor t, some martingale q on the sample atoms.
TValue solve_at(const std::vector<Point>& grid, const std::vector<double>& gv, const DiscreteMeasure& samples,
                const std::vector<std::size_t>& sample_slot, double t) {
  const std::size_t G = grid.size(), n = samples.size(), d = samples.dim();
  LinearProgram prog(G + n, Sense::Maximize);
  for (std::size_t a = 0; a < G; ++a) prog.objective[a] = gv[a];
  std::vector<double> row(G + n, 0.0);
  for (std::size_t a = 0; a < G; ++a) row[a] = 1.0;
  prog.add_equality(row, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t a = 0; a < G; ++a) row[a] = grid[a][j];
    prog.add_equality(row, 1.0);
  }
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) row[G + i] = 1.0;
  prog.add_equality(row, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) row[G + i] = samples.atom(i)[j];
    prog.add_equality(row, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[G + i] = 1.0;
    row[sample_slot[i]] = -t;
    prog.add_inequality(row, RowSense::LessEqual, 0.0);
  }
  const auto sol = lp::solve_lp(prog);
  TValue out;
  if (!sol.optimal()) return out;
  out.feasible = true;
  out.value = sol.objective;
  out.Q.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(G));
  return out;
}

}  // namespace

void PenaltyConfig::validate() const {
  if (C && !(*C > 0.0)) fail(ErrorKind::ConfigError, "penalty weight C must be positive");
  if (t_max != 0.0 && !(t_max > 1.0)) fail(ErrorKind::ConfigError, "t_max must exceed 1");
  if (t_points < 2) fail(ErrorKind::ConfigError, "t grid needs at least two points");
}

double min_density_ratio(const DiscreteMeasure& Q, const DiscreteMeasure& samples) {
  if (samples.size() == 0) fail(ErrorKind::EmptySample, "density ratio against an empty sample");
  if (Q.size() > 0 && Q.dim() != samples.dim()) fail(ErrorKind::ShapeError, "measures differ in dimension");
  std::map<Point, double> mass;
  for (std::size_t a = 0; a < Q.size(); ++a) mass[Q.atom_point(a)] = Q.weight(a);
  const std::size_t n = samples.size(), d = samples.dim();
  // variables q_1..q_n, t
  LinearProgram prog(n + 1, Sense::Minimize);
  prog.objective[n] = 1.0;
  prog.lower[n] = 1.0;
  std::vector<double> row(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) row[i] = 1.0;
  prog.add_equality(row, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) row[i] = samples.atom(i)[j];
    prog.add_equality(row, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = mass.find(samples.atom_point(i));
    const double qi = it == mass.end() ? 0.0 : it->second;
    if (qi == 0.0) {
      prog.upper[i] = 0.0;
      continue;
    }
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = 1.0;
    row[n] = -qi;
    prog.add_inequality(row, RowSense::LessEqual, 0.0);
  }
  const auto sol = lp::solve_lp(prog);
  return sol.optimal() ? sol.objective : kInfinity;
}

PenaltyResult penalty_estimate(const DiscreteMeasure& samples, const PayoffExpr& g, const PenaltyConfig& cfg) {
  cfg.validate();
  if (samples.size() == 0) fail(ErrorKind::EmptySample, "penalty estimate needs samples");
  if (g.arity() != samples.dim()) fail(ErrorKind::ShapeError, "payoff dimension does not match the data");
  const std::size_t d = samples.dim();

  std::vector<Point> raw = cfg.grid;
  if (raw.empty()) {
    if (d != 1) fail(ErrorKind::ConfigError, "multivariate data needs an explicit penalty grid");
    raw = samples.points();
    const double top = 1.5 * samples.values_1d().back();
    for (std::size_t k = 0; k < cfg.auto_points; ++k) {
      raw.push_back({cfg.auto_points == 1 ? 0.0 : top * static_cast<double>(k) / static_cast<double>(cfg.auto_points - 1)});
    }
  }
  for (const auto& p : raw)
    if (p.size() != d) fail(ErrorKind::ConfigError, "grid point dimension does not match the data");
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

  PenaltyResult res;
  res.grid = raw;
  const std::size_t G = raw.size();
  std::vector<std::size_t> slot(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto it = std::lower_bound(raw.begin(), raw.end(), samples.atom_point(i));
    if (it == raw.end() || *it != samples.atom_point(i)) {
      fail(ErrorKind::ConfigError, "penalty grid does not contain every sample atom");
    }
    slot[i] = static_cast<std::size_t>(it - raw.begin());
  }
  std::vector<double> gv(G);
  double sup = 0.0;
  for (std::size_t a = 0; a < G; ++a) {
    gv[a] = g.eval(raw[a]);
    sup = std::max(sup, std::abs(gv[a]));
  }
  res.C = cfg.C.value_or(sup > 0.0 ? sup : 1.0);
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 10.0 * static_cast<double>(G);

  std::map<double, TValue> seen;
  auto evaluate = [&](const std::vector<double>& ts) {
    std::vector<double> todo;
    for (double t : ts)
      if (!seen.count(t)) todo.push_back(t);
    auto vals = parallel_map(todo.size(), cfg.threads,
                             [&](std::size_t i) { return solve_at(raw, gv, samples, slot, todo[i]); });
    for (std::size_t i = 0; i < todo.size(); ++i) seen.emplace(todo[i], std::move(vals[i]));
  };
  auto penalised = [&](double t) { return seen.at(t).value - res.C * (t - 1.0); };

  evaluate({1.0});
  if (!seen.at(1.0).feasible) {
    fail(ErrorKind::ArbitrageDetected, "no martingale measure is supported on the sample atoms");
  }
  std::vector<double> ts(cfg.t_points);
  for (std::size_t k = 0; k < cfg.t_points; ++k) {
    ts[k] = std::pow(t_max, static_cast<double>(k) / static_cast<double>(cfg.t_points - 1));
  }
  ts.front() = 1.0;
  evaluate(ts);

  auto best_t = [&] {
    double bt = 1.0, bv = -kInfinity;
    for (const auto& [t, v] : seen) {
      if (!v.feasible) continue;
      const double pv = v.value - res.C * (t - 1.0);
      if (pv > bv) {
        bv = pv;
        bt = t;
      }
    }
    return bt;
  };
  for (std::size_t round = 0; round < cfg.refine_rounds; ++round) {
    const double bt = best_t();
    auto it = seen.find(bt);
    const double lo = it == seen.begin() ? bt : std::prev(it)->first;
    const double hi = std::next(it) == seen.end() ? bt : std::next(it)->first;
    std::vector<double> fine;
    for (int k = 1; k < 8; ++k) {
      fine.push_back(lo + (bt - lo) * k / 8.0);
      fine.push_back(bt + (hi - bt) * k / 8.0);
    }
    evaluate(fine);
  }
  res.t = best_t();
  res.value = penalised(res.t);
  res.Q = seen.at(res.t).Q;
  for (const auto& [t, v] : seen)
    if (v.feasible) res.profile.emplace_back(t, v.value - res.C * (t - 1.0));
  return res;
}

}  // namespace superhedge
