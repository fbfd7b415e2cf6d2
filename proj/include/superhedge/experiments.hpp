#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superhedge/law.hpp"
#include "superhedge/measure.hpp"
#include "superhedge/payoff.hpp"
#include "superhedge/penalty.hpp"
#include "superhedge/wasserstein.hpp"
#include "superhedge/winf.hpp"

namespace superhedge {

/// Moves the mass of each atom of Q onto its two neighbouring support points
/// by linear interpolation; mass outside [support_min, support_max] goes to
/// the nearest endpoint.
DiscreteMeasure balayage_1d(const DiscreteMeasure& Q, const std::vector<double>& support);

struct Modulus {
  enum class Kind { Lipschitz, Holder, Table } kind = Kind::Lipschitz;
  double L = 1.0;
  double gamma = 1.0;
  /// (x, delta(x)) pairs, increasing in x, linearly interpolated.
  std::vector<std::pair<double, double>> table;
  double operator()(double x) const;
};

struct RateBound {
  double dN = 0.0;
  double kappa = 0.0;
  double modulus_term = 0.0;
  double tail_term = 0.0;
  double bound = 0.0;
};

/// delta(kappa^N) plus 1/F^-1(1 - d_N) for unbounded laws, with d_N from DKW
/// at confidence 1 - beta.
RateBound rate_bound(const Law& law, std::size_t N, const Modulus& delta, bool bounded, double beta = 0.05);

/// sup over martingale laws on the support of `law`: the concave envelope of g
/// over the support at 1. Unbounded supports are truncated far out, which is
/// flagged through `proxy`.
double reference_price(const Law& law, const PayoffExpr& g, bool* proxy = nullptr);

struct EstimatorSpec {
  enum class Method { Plugin, WassersteinLower, WassersteinUpper, Winf, Penalty } method = Method::Plugin;
  WassersteinConfig wasserstein;
  WinfConfig winf;
  PenaltyConfig penalty;

  static Method parse_method(const std::string& name);
  double estimate(const DiscreteMeasure& mu, const PayoffExpr& g, std::size_t N) const;
};
const char* to_string(EstimatorSpec::Method m);

struct StudyReport {
  std::string study;
  std::vector<std::size_t> Ns;
  std::vector<double> mean, sd, se;
  double reference = 0.0;
  bool reference_proxy = false;
  /// Least squares slope of log|reference - mean| on log N, smallest N dropped.
  double slope = 0.0;
  double slope_se = 0.0;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  std::size_t slope_points = 0;
  /// values[i][run] at Ns[i]; NaN where the estimator failed on that sample
  /// (e.g. no martingale measure on the sample), counted in `skipped`.
  std::vector<std::vector<double>> values;
  std::vector<std::size_t> skipped;
  std::map<std::string, std::string> config;
};

struct StudyOptions {
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<double> reference;
};

/// Run r draws its samples from stream r, so the samples at smaller N are a
/// prefix of those at larger N.
StudyReport convergence_study(const Law& law, const PayoffExpr& g, const std::vector<std::size_t>& Ns,
                              const EstimatorSpec& est, const StudyOptions& opt);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  std::size_t points = 0;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Perturbation {
  enum class Kind { WinfShift, Contaminate } kind = Kind::WinfShift;
  double delta = 0.0;   // shift size
  double lambda = 0.0;  // contamination weight
  double x = 0.0;       // contamination point
  static Perturbation parse(const std::string& text);
  std::string describe() const;
};

struct RobustnessReport {
  std::vector<double> base;
  std::vector<double> perturbed;
  double distance = 0.0;  // W1 between the two samples of estimates
  double mean_shift = 0.0;
  std::map<std::string, std::string> config;
};

/// Paired runs: base and perturbed samples share their uniforms.
RobustnessReport robustness_study(const Law& law, const Perturbation& pert, const PayoffExpr& g,
                                  const EstimatorSpec& est, std::size_t N, const StudyOptions& opt);

struct BacktestConfig {
  std::size_t window = 50;
  std::size_t smoothing = 10;
  /// AV@R tail level; 0.05 is the 95% confidence reading.
  double level = 0.05;
  WassersteinConfig wasserstein;
};

struct BacktestResult {
  /// Index of the last observation in each window.
  std::vector<std::size_t> time;
  std::vector<double> plugin, wasserstein;
  std::vector<double> plugin_smoothed, wasserstein_smoothed;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  double box = 0.0;
};

/// Per window: plugin = inf_H AV@R(g - H(r-1)) under the window's empirical law,
/// wasserstein = boxed version + (L + B) eps / level. Smoothed series are
/// trailing means over `smoothing` windows (shorter at the start).
BacktestResult rolling_backtest(const ReturnSeries& series, const PayoffExpr& g, const BacktestConfig& cfg);

void write_study_csv(std::ostream& out, const StudyReport& report);
void write_study_json(std::ostream& out, const StudyReport& report);

}  // namespace superhedge
