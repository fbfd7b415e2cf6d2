#include "superhedge/multiperiod.hpp"

#include <cmath>

#include "superhedge/error.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/oneperiod.hpp"

namespace superhedge {

namespace {

double path_count(std::size_t N, std::size_t T) { return std::pow(static_cast<double>(N), static_cast<double>(T)); }

struct Recursion {
  const MultiperiodProblem& p;
  std::vector<double> support;  // 1-D sample values
  std::vector<double> path;

  // Value at a prefix of length t (path holds t*d coordinates).
  double value(std::size_t t) {
    const std::size_t n = p.samples.size(), d = p.samples.dim();
    if (t == p.T) return p.payoff.eval(path);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = p.samples.atom(i);
      path.insert(path.end(), a.begin(), a.end());
      next[i] = value(t + 1);
      path.resize(path.size() - d);
    }
    if (d == 1) return concave_envelope_at(support, next, 1.0).value;
    return price_primal(p.samples, next).price;
  }
};

}  // namespace

void MultiperiodProblem::validate() const {
  if (T < 1) fail(ErrorKind::ParameterError, "need at least one period");
  if (samples.size() == 0) fail(ErrorKind::EmptySample, "multiperiod pricing needs samples");
  if (!payoff.valid()) fail(ErrorKind::ParameterError, "multiperiod payoff is missing");
  if (payoff.dim() != samples.dim() || payoff.periods() != T) {
    fail(ErrorKind::ShapeError, "payoff is declared for dim " + std::to_string(payoff.dim()) + " and " +
                                    std::to_string(payoff.periods()) + " periods, problem has dim " +
                                    std::to_string(samples.dim()) + " and " + std::to_string(T));
  }
}

double multiperiod_plugin(const MultiperiodProblem& problem) {
  problem.validate();
  if (path_count(problem.samples.size(), problem.T) > 1e6) {
    fail(ErrorKind::SizeError, "N^T exceeds 1e6 sample paths; coarsen the support or shorten the horizon");
  }
  const auto na = check_na(problem.samples);
  if (!na.arbitrage_free) {
    fail(ErrorKind::ArbitrageDetected, "sample support admits arbitrage", na.arbitrage_direction);
  }
  Recursion rec{problem, {}, {}};
  if (problem.samples.dim() == 1) rec.support = problem.samples.values_1d();
  rec.path.reserve(problem.T * problem.samples.dim());
  return rec.value(0);
}

double brute_force_oracle(const MultiperiodProblem& problem) {
  problem.validate();
  const std::size_t n = problem.samples.size(), d = problem.samples.dim(), T = problem.T;
  if (path_count(n, T) > 1e4) fail(ErrorKind::SizeError, "N^T exceeds 1e4 paths for the brute-force LP");
  std::size_t P = 1;
  for (std::size_t t = 0; t < T; ++t) P *= n;

  // Path index in base n, first period most significant.
  lp::LinearProgram prog(P, lp::Sense::Maximize);
  std::vector<double> point(T * d);
  for (std::size_t k = 0; k < P; ++k) {
    std::size_t rem = k;
    for (std::size_t t = T; t-- > 0;) {
      const auto a = problem.samples.atom(rem % n);
      std::copy(a.begin(), a.end(), point.begin() + static_cast<std::ptrdiff_t>(t * d));
      rem /= n;
    }
    prog.objective[k] = problem.payoff.eval(point);
  }
  prog.add_equality(std::vector<double>(P, 1.0), 1.0);
  // For each period t and prefix of length t-1: sum over the period-t atom of
  // q(prefix, r_t, *) (r_t - 1) = 0.
  std::size_t prefixes = 1;
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t block = 1;  // number of suffix paths after period t
    for (std::size_t s = t + 1; s < T; ++s) block *= n;
    for (std::size_t pre = 0; pre < prefixes; ++pre) {
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> row(P, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const double ex = problem.samples.atom(i)[j] - 1.0;
          const std::size_t start = (pre * n + i) * block;
          for (std::size_t s = 0; s < block; ++s) row[start + s] = ex;
        }
        prog.add_equality(row, 0.0);
      }
    }
    prefixes *= n;
  }
  const auto sol = lp::solve_lp(prog);
  if (sol.status == lp::Status::Infeasible) fail(ErrorKind::ArbitrageDetected, "no martingale measure on the path grid");
  if (!sol.optimal()) fail(ErrorKind::SolverStall, "path LP did not reach an optimum");
  return sol.objective;
}

}  // namespace superhedge
