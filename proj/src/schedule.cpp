#include "superhedge/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/error.hpp"

namespace superhedge {

void ScheduleParams::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0)) fail(ErrorKind::ParameterError, "c1 and c2 must be positive");
  if (!(p >= 1.0)) fail(ErrorKind::ParameterError, "Wasserstein order p must be >= 1");
  if (!(a > 0.0)) fail(ErrorKind::ParameterError, "moment exponent a must be positive");
  if (d < 1) fail(ErrorKind::ParameterError, "dimension d must be >= 1");
}

double beta_exp_sqrt(std::size_t N) { return std::exp(-std::sqrt(static_cast<double>(N))); }

double epsilon_schedule(std::size_t N, double beta, const ScheduleParams& params, ScheduleBranch branch) {
  params.validate();
  if (N < 1) fail(ErrorKind::ParameterError, "sample size must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) fail(ErrorKind::LevelError, "confidence beta must lie in (0,1)");
  const double n = static_cast<double>(N);

  if (branch == ScheduleBranch::Markov) {
    if (!(params.s > 3.0)) fail(ErrorKind::ParameterError, "Markov branch needs s > 3");
    if (!(params.q > 2.0 * params.p * params.s / (params.s - 2.0))) {
      fail(ErrorKind::ParameterError, "Markov branch needs q > 2ps/(s-2)");
    }
    const double kappa = params.kappaN ? *params.kappaN : markov_kappa(N, params);
    if (!(kappa > 0.0)) fail(ErrorKind::ParameterError, "kappa_N must be positive");
    return std::pow(kappa / beta, 1.0 / params.p);
  }

  if (static_cast<double>(params.d) == 2.0 * params.p) {
    fail(ErrorKind::ParameterError, "iid concentration bound excludes d = 2p");
  }
  const double log_term = std::log(params.c1 / beta);
  if (!(log_term > 0.0)) fail(ErrorKind::ParameterError, "need c1 > beta so that log(c1/beta) > 0");
  const double base = log_term / (params.c2 * n);
  if (n >= log_term / params.c2) {
    const double m = std::min(std::max(params.d / params.p, 2.0), params.a / (2.0 * params.p));
    return std::pow(base, 1.0 / m);
  }
  return std::pow(base, 2.0 * params.p / params.a);
}

double markov_kappa(std::size_t N, const ScheduleParams& params) {
  const double n = static_cast<double>(N);
  const double p = params.p;
  const double d = params.d;
  const double qs = params.q * (params.s - 2.0) / (2.0 * params.s);
  const double ds = d * (3.0 * params.s + 2.0) / (2.0 * params.s);
  const double tail = std::pow(n, -(qs - p) / qs);
  const double C = params.c1;
  if (p > ds / (2.0 * params.s) && qs != 2.0 * p) return C * (std::pow(n, -0.5) + tail);
  if (p == ds / (2.0 * params.s) && qs != 2.0 * p) return C * (std::pow(n, -0.5) * std::log1p(n) + tail);
  if (p > 0.0 && p < ds / 2.0 && qs != ds / (ds - p)) return C * (std::pow(n, -p / d) + tail);
  fail(ErrorKind::ParameterError, "moment/mixing orders fall on an excluded boundary case");
}

double dkw_bound(std::size_t N, double eps) {
  if (!(eps > 0.0) || N < 1) fail(ErrorKind::ParameterError, "dkw_bound needs eps > 0 and N >= 1");
  return std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(N) * eps * eps));
}

double kappa_interquantile(const Law& law, double dN, bool bounded) {
  if (!(dN > 0.0 && dN <= 1.0 / 3.0)) fail(ErrorKind::LevelError, "d_N must lie in (0, 1/3]");
  const auto kmax = static_cast<std::size_t>(std::floor(1.0 / (3.0 * dN) + 1e-12));
  double kappa = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double hi = std::min(1.0, 3.0 * static_cast<double>(k) * dN);
    const double lo = std::max(0.0, 3.0 * static_cast<double>(k - 1) * dN);
    kappa = std::max(kappa, law.quantile(hi) - law.quantile(lo));
  }
  if (bounded) kappa = std::max(kappa, law.quantile(1.0) - law.quantile(1.0 - dN));
  return kappa;
}

}  // namespace superhedge
