#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "superhedge/distance.hpp"

namespace superhedge::lp {

enum class Sense { Minimize, Maximize };
enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status status);

/// Dense linear program
///   min/max c'x  s.t.  a_i'x (<=,>=,=) b_i,  lower <= x <= upper.
/// Bounds default to [0, +inf); either side may be infinite.
struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars, Sense s = Sense::Minimize)
      : sense(s), objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInfinity) {}

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  /// Appends a variable with the given bounds; returns its index.
  std::size_t add_var(double cost = 0.0, double lo = 0.0, double hi = kInfinity);
  void set_free(std::size_t j) {
    lower[j] = -kInfinity;
    upper[j] = kInfinity;
  }
  std::size_t add_row(std::vector<double> coeffs, RowSense sense, double rhs);
  std::size_t add_equality(std::vector<double> coeffs, double rhs) {
    return add_row(std::move(coeffs), RowSense::Equal, rhs);
  }
  std::size_t add_inequality(std::vector<double> coeffs, RowSense sense, double rhs) {
    return add_row(std::move(coeffs), sense, rhs);
  }

  /// Throws ShapeError on inconsistent dimensions or non-finite data.
  void validate() const;
};

struct LpSolution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  /// Shadow prices ∂objective/∂rhs_i, one per row (equality and inequality).
  std::vector<double> duals;
  /// c_j - a_j'y per variable.
  std::vector<double> reduced_costs;
  /// Objective of the dual solution (b'y plus active bound terms).
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
  /// Improving direction of the original variables when unbounded.
  std::vector<double> ray;
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
};

struct SolverOptions {
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  /// Consecutive degenerate pivots before the entering rule switches from
  /// most-negative reduced cost to Bland's smallest index.
  std::size_t degenerate_switch = 50;
  std::size_t max_iterations = 0;  // 0: automatic bound
};

/// Two-phase dense tableau simplex. Deterministic: identical programs give
/// bit-identical solutions. Throws ShapeError for malformed programs and
/// SolverStall when the pivot bound is exhausted.
LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

}  // namespace superhedge::lp
