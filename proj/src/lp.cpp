#include "superhedge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superhedge/error.hpp"

namespace superhedge::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

std::size_t LinearProgram::add_var(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& row : rows) row.push_back(0.0);
  return objective.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<double> coeffs, RowSense sense, double b) {
  rows.push_back(std::move(coeffs));
  row_sense.push_back(sense);
  rhs.push_back(b);
  return rows.size() - 1;
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) fail(ErrorKind::ShapeError, "bound vectors must match variable count");
  if (row_sense.size() != rows.size() || rhs.size() != rows.size()) {
    fail(ErrorKind::ShapeError, "row sense / rhs counts must match row count");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) {
      fail(ErrorKind::ShapeError, "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                      " coefficients for " + std::to_string(n) + " variables");
    }
    if (!std::isfinite(rhs[i])) fail(ErrorKind::ShapeError, "rhs entries must be finite");
    for (double a : rows[i]) {
      if (!std::isfinite(a)) fail(ErrorKind::ShapeError, "constraint coefficients must be finite");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) fail(ErrorKind::ShapeError, "objective coefficients must be finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInfinity ||
        upper[j] == -kInfinity) {
      fail(ErrorKind::ShapeError, "variable " + std::to_string(j) + " has inconsistent bounds");
    }
  }
}

namespace {

enum class MapKind { Shift, Mirror, Split };

struct VarMap {
  MapKind kind;
  std::size_t col;
  std::size_t col2;  // Split only
  double offset;
};

/// Row-major dense tableau with the reduced-cost row stored last and the
/// right-hand side in the last column.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double rhs(std::size_t i) const { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }
  double cost(std::size_t j) const { return at(m_, j); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &data_[r * (n_ + 1)];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j <= n_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * (n_ + 1)];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (prow[j] != 0.0) row[j] -= f * prow[j];
      }
      row[c] = 0.0;
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> data_;
};

struct StdForm {
  std::size_t structural = 0;     // columns for transformed original variables
  std::size_t num_slack = 0;
  std::vector<VarMap> maps;
  std::vector<std::vector<double>> a;  // rows x structural
  std::vector<double> b;
  std::vector<int> slack_sign;         // +1 (<=), -1 (>=), 0 (=)
  std::vector<std::size_t> slack_col;  // index among slack columns
  std::vector<double> row_flip;        // +1 or -1
  std::vector<double> cost;            // structural costs (min form)
  double cost_offset = 0.0;
  std::size_t original_rows = 0;
};

StdForm to_standard(const LinearProgram& lp) {
  StdForm sf;
  const std::size_t n = lp.num_vars();
  const double obj_sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (structural col, bound)

  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    VarMap vm{};
    if (std::isfinite(lo)) {
      vm = {MapKind::Shift, sf.structural++, 0, lo};
      if (std::isfinite(hi)) upper_rows.emplace_back(vm.col, hi - lo);
    } else if (std::isfinite(hi)) {
      vm = {MapKind::Mirror, sf.structural++, 0, hi};
    } else {
      vm = {MapKind::Split, sf.structural, sf.structural + 1, 0.0};
      sf.structural += 2;
    }
    sf.maps.push_back(vm);
  }

  sf.cost.assign(sf.structural, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = obj_sign * lp.objective[j];
    const auto& vm = sf.maps[j];
    switch (vm.kind) {
      case MapKind::Shift: sf.cost[vm.col] += c; sf.cost_offset += c * vm.offset; break;
      case MapKind::Mirror: sf.cost[vm.col] -= c; sf.cost_offset += c * vm.offset; break;
      case MapKind::Split: sf.cost[vm.col] += c; sf.cost[vm.col2] -= c; break;
    }
  }

  auto push_row = [&](std::vector<double> row, RowSense sense, double b) {
    int sign = 0;
    if (sense == RowSense::LessEqual) sign = 1;
    if (sense == RowSense::GreaterEqual) sign = -1;
    sf.slack_sign.push_back(sign);
    sf.slack_col.push_back(sign != 0 ? sf.num_slack++ : 0);
    sf.a.push_back(std::move(row));
    sf.b.push_back(b);
  };

  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    std::vector<double> row(sf.structural, 0.0);
    double b = lp.rhs[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double a = lp.rows[i][j];
      if (a == 0.0) continue;
      const auto& vm = sf.maps[j];
      switch (vm.kind) {
        case MapKind::Shift: row[vm.col] += a; b -= a * vm.offset; break;
        case MapKind::Mirror: row[vm.col] -= a; b -= a * vm.offset; break;
        case MapKind::Split: row[vm.col] += a; row[vm.col2] -= a; break;
      }
    }
    push_row(std::move(row), lp.row_sense[i], b);
  }
  sf.original_rows = lp.num_rows();
  for (const auto& [col, bound] : upper_rows) {
    std::vector<double> row(sf.structural, 0.0);
    row[col] = 1.0;
    push_row(std::move(row), RowSense::LessEqual, bound);
  }

  sf.row_flip.assign(sf.b.size(), 1.0);
  for (std::size_t i = 0; i < sf.b.size(); ++i) {
    if (sf.b[i] < 0.0) sf.row_flip[i] = -1.0;
  }
  return sf;
}

class Simplex {
 public:
  Simplex(const StdForm& sf, const SolverOptions& opt)
      : sf_(sf),
        opt_(opt),
        m_(sf.b.size()),
        slack0_(sf.structural),
        ident0_(sf.structural + sf.num_slack),
        ncols_(ident0_ + m_),
        tab_(m_, ncols_),
        basis_(m_) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double f = sf.row_flip[i];
      for (std::size_t j = 0; j < sf.structural; ++j) tab_.at(i, j) = f * sf.a[i][j];
      if (sf.slack_sign[i] != 0) tab_.at(i, slack0_ + sf.slack_col[i]) = f * sf.slack_sign[i];
      tab_.at(i, ident0_ + i) = 1.0;
      tab_.rhs(i) = f * sf.b[i];
      const bool slack_basic = sf.slack_sign[i] != 0 && f * sf.slack_sign[i] > 0.0;
      basis_[i] = slack_basic ? slack0_ + sf.slack_col[i] : ident0_ + i;
    }
    std::size_t budget = opt.max_iterations;
    if (budget == 0) budget = std::max<std::size_t>(20000, 100 * (m_ + ncols_));
    max_iter_ = budget;
  }

  Status run() {
    // Phase 1: minimise the sum of artificial (identity) variables in the basis.
    bool any_artificial = false;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= ident0_) any_artificial = true;
    }
    if (any_artificial) {
      std::vector<double> c1(ncols_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= ident0_) c1[basis_[i]] = 1.0;
      }
      price_out(c1);
      if (iterate(true) == Status::Unbounded) {
        fail(ErrorKind::SolverStall, "phase one reported unbounded; numerical breakdown");
      }
      double scale = 1.0;
      for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, std::abs(tab_.rhs(i)));
      if (-tab_.rhs(m_) > opt_.feasibility_tol * scale * 10.0) return Status::Infeasible;
      drive_out_artificials();
    }

    std::vector<double> c2(ncols_, 0.0);
    std::copy(sf_.cost.begin(), sf_.cost.end(), c2.begin());
    price_out(c2);
    const Status st = iterate();
    return st;
  }

  /// Standard-form primal values.
  std::vector<double> primal() const {
    std::vector<double> x(ncols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = tab_.rhs(i);
    return x;
  }

  /// Duals of the (sign-flipped) standard rows.
  std::vector<double> row_duals() const {
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = -tab_.cost(ident0_ + i);
    return y;
  }

  std::vector<double> ray_direction() const { return ray_; }
  std::size_t iterations() const { return iterations_; }

 private:
  void price_out(const std::vector<double>& c) {
    for (std::size_t j = 0; j < ncols_; ++j) tab_.cost(j) = c[j];
    tab_.rhs(m_) = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= ncols_; ++j) tab_.at(m_, j) -= cb * tab_.at(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) tab_.cost(basis_[i]) = 0.0;
  }

  /// In phase one the objective is bounded below by zero, so a column with a
  /// negative reduced cost but no positive pivot entry is rounding noise; it is
  /// skipped until the next pivot.
  Status iterate(bool phase_one = false) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::vector<char> blocked(ncols_, 0);
    while (true) {
      if (iterations_ >= max_iter_) {
        std::ostringstream msg;
        msg << "simplex exceeded " << max_iter_ << " pivots (" << m_ << " rows, " << ncols_ << " columns)";
        fail(ErrorKind::SolverStall, msg.str());
      }
      std::size_t enter = ncols_;
      double best = -opt_.optimality_tol;
      for (std::size_t j = 0; j < ident0_; ++j) {
        if (blocked[j]) continue;
        const double r = tab_.cost(j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter == ncols_) return Status::Optimal;

      std::size_t leave = m_;
      double best_ratio = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tab_.at(i, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(tab_.rhs(i), 0.0) / a;
        const double eps = 1e-12 * std::max(1.0, std::abs(best_ratio));
        if (leave == m_ || ratio < best_ratio - eps) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + eps && basis_[i] < basis_[leave]) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leave == m_ && phase_one) {
        blocked[enter] = 1;
        continue;
      }
      if (leave == m_) {
        ray_.assign(ncols_, 0.0);
        ray_[enter] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) ray_[basis_[i]] = -tab_.at(i, enter);
        return Status::Unbounded;
      }
      if (best_ratio <= opt_.feasibility_tol) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
      }
      tab_.pivot(leave, enter);
      basis_[leave] = enter;
      ++iterations_;
      std::fill(blocked.begin(), blocked.end(), 0);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < ident0_) continue;
      std::size_t best = ncols_;
      double mag = opt_.pivot_tol;
      for (std::size_t j = 0; j < ident0_; ++j) {
        if (std::abs(tab_.at(i, j)) > mag) {
          mag = std::abs(tab_.at(i, j));
          best = j;
        }
      }
      if (best == ncols_) continue;  // redundant row
      tab_.pivot(i, best);
      basis_[i] = best;
      ++iterations_;
    }
  }

  const StdForm& sf_;
  SolverOptions opt_;
  std::size_t m_, slack0_, ident0_, ncols_;
  Tableau tab_;
  std::vector<std::size_t> basis_;
  std::vector<double> ray_;
  std::size_t iterations_ = 0;
  std::size_t max_iter_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& options) {
  lp.validate();
  const StdForm sf = to_standard(lp);
  Simplex simplex(sf, options);
  LpSolution sol;
  sol.status = simplex.run();
  sol.iterations = simplex.iterations();
  const std::size_t n = lp.num_vars();
  const double obj_sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;

  auto to_original = [&](const std::vector<double>& xs, bool direction) {
    std::vector<double> x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& vm = sf.maps[j];
      const double base = direction ? 0.0 : vm.offset;
      switch (vm.kind) {
        case MapKind::Shift: x[j] = base + xs[vm.col]; break;
        case MapKind::Mirror: x[j] = base - xs[vm.col]; break;
        case MapKind::Split: x[j] = xs[vm.col] - xs[vm.col2]; break;
      }
    }
    return x;
  };

  if (sol.status == Status::Unbounded) {
    sol.ray = to_original(simplex.ray_direction(), true);
    sol.objective = lp.sense == Sense::Maximize ? kInfinity : -kInfinity;
    return sol;
  }
  if (sol.status == Status::Infeasible) return sol;

  sol.x = to_original(simplex.primal(), false);
  for (std::size_t j = 0; j < n; ++j) {
    // Clamp rounding noise back into the box.
    sol.x[j] = std::clamp(sol.x[j], lp.lower[j], lp.upper[j]);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];

  // Shadow prices in min form, then in the caller's sense.
  const auto ystd = simplex.row_duals();
  std::vector<double> ymin(lp.num_rows());
  for (std::size_t i = 0; i < lp.num_rows(); ++i) ymin[i] = sf.row_flip[i] * ystd[i];
  sol.duals.resize(lp.num_rows());
  for (std::size_t i = 0; i < lp.num_rows(); ++i) sol.duals[i] = obj_sign * ymin[i];

  sol.reduced_costs.assign(n, 0.0);
  double dual_min = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) dual_min += lp.rhs[i] * ymin[i];
  for (std::size_t j = 0; j < n; ++j) {
    double z = obj_sign * lp.objective[j];
    for (std::size_t i = 0; i < lp.num_rows(); ++i) z -= lp.rows[i][j] * ymin[i];
    sol.reduced_costs[j] = obj_sign * z;
    if (std::abs(z) <= 1e-9 * std::max(1.0, std::abs(lp.objective[j]))) continue;
    const double bound = z > 0.0 ? lp.lower[j] : lp.upper[j];
    if (std::isfinite(bound)) dual_min += z * bound;
  }
  sol.dual_objective = obj_sign * dual_min;

  double resid = 0.0, compl_resid = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += lp.rows[i][j] * sol.x[j];
    const double slack = ax - lp.rhs[i];
    double viol = 0.0;
    switch (lp.row_sense[i]) {
      case RowSense::Equal: viol = std::abs(slack); break;
      case RowSense::LessEqual: viol = std::max(slack, 0.0); break;
      case RowSense::GreaterEqual: viol = std::max(-slack, 0.0); break;
    }
    resid = std::max(resid, viol);
    if (lp.row_sense[i] != RowSense::Equal) compl_resid = std::max(compl_resid, std::abs(sol.duals[i] * slack));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double z = obj_sign * sol.reduced_costs[j];  // min form
    if (std::abs(z) <= 1e-9) continue;
    const double bound = z > 0.0 ? lp.lower[j] : lp.upper[j];
    const double gap = std::isfinite(bound) ? std::abs(sol.x[j] - bound) : 1.0;
    compl_resid = std::max(compl_resid, std::abs(z) * gap);
  }
  sol.primal_residual = resid;
  sol.complementarity_residual = compl_resid;
  return sol;
}

}  // namespace superhedge::lp
