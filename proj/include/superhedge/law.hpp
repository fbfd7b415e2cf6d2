#pragma once

#include <optional>
#include <string>

#include "superhedge/measure.hpp"

namespace superhedge {

double normal_cdf(double x);
/// Inverse standard normal CDF, accurate to ~1e-15 on (0,1).
double normal_quantile(double p);

/// Closed catalogue of one-dimensional laws on [0, ∞) with analytic CDF and
/// quantile. Used for true-distribution quantities in rate experiments and
/// for inverse-CDF sampling.
class Law {
 public:
  enum class Kind { Uniform, Exponential, LogNormal, HalfNormal, ThinnedUniform, Discrete };

  static Law uniform(double a, double b);
  static Law exponential(double rate);
  static Law lognormal(double mu, double sigma);
  static Law halfnormal(double sigma = 1.0);
  /// Tail-thinned uniform on [0,2]: density r^n/(n+1) on [0,1] and
  /// (2-r)^n/(n+1) on [1,2] relative to uniform[0,2].
  static Law thinned_uniform(int n);
  static Law discrete(DiscreteMeasure m);

  /// Parses "uniform(0,2)", "exp(1)", "lognormal(0,1)", "halfnormal",
  /// "thinned(10)", "discrete(0:1,1:2,2:1)" (point:relative weight).
  static Law parse(const std::string& text);

  Kind kind() const { return kind_; }
  double cdf(double x) const;
  /// Left-continuous inverse inf{x : F(x) >= p}; at p = 0 returns the 0+
  /// limit (lower end of the support).
  double quantile(double p) const;
  double mean() const;
  bool bounded() const;
  double support_min() const;
  double support_max() const;  // +inf when unbounded
  /// Draw from a uniform variate in (0,1).
  double sample(double u) const;
  std::string describe() const;
  const std::optional<DiscreteMeasure>& atoms() const { return atoms_; }

 private:
  Kind kind_ = Kind::Uniform;
  double p1_ = 0.0;
  double p2_ = 1.0;
  std::optional<DiscreteMeasure> atoms_;
};

}  // namespace superhedge
