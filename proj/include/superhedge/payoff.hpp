#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superhedge/measure.hpp"

namespace superhedge {

namespace payoff_detail {
struct Node;
}

/// Parsed payoff g over a return vector.
///
/// Grammar (whitespace insensitive):
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('-' | '+') unary | factor
///   factor := atom ['^' number]
///   atom   := number | var | '(' expr ')' | func '(' args ')' | '|' expr '|'
///   func   := max | min | abs | pos | sqrt | exp | log | ind
///
/// `ind` takes one comparison `a op b` with op in {<=, <, >=, >, ==}.
/// Variables: `r` (d = 1, T = 1), `r1`..`rd` (T = 1), `x1`..`xT` (d = 1),
/// `x<t>_<j>` (T > 1, d > 1). Point layout is period-major: index (t-1)*d + j-1.
///
/// A `sqrt` that appears in a product with an `ind(...)` factor is treated as
/// guarded: the product short-circuits to 0 when the indicator vanishes and a
/// negative radicand clamps to 0 (recorded in `warnings()`). Unguarded negative
/// radicands, log of non-positive values and division by zero raise EvalError.
class PayoffExpr {
 public:
  PayoffExpr() = default;

  static PayoffExpr parse(const std::string& text, std::size_t dim = 1, std::size_t periods = 1);

  double operator()(std::span<const double> point) const { return eval(point); }
  double eval(std::span<const double> point) const;
  double eval_scalar(double r) const;

  /// Canonical text; parse(to_string()) reproduces the same canonical text.
  std::string to_string() const;
  const std::string& source() const { return source_; }
  std::size_t dim() const { return dim_; }
  std::size_t periods() const { return periods_; }
  std::size_t arity() const { return dim_ * periods_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Upper bound on the Lipschitz constant (Euclidean norm on the input) for
  /// expressions built from + - max min abs pos and scaling by constants.
  /// Empty when the expression leaves that fragment.
  std::optional<double> lipschitz_bound() const;

  bool valid() const { return root_ != nullptr; }

 private:
  std::shared_ptr<const payoff_detail::Node> root_;
  std::string source_;
  std::size_t dim_ = 1;
  std::size_t periods_ = 1;
  std::vector<std::string> warnings_;
};

/// Evaluates g on every atom of a measure.
std::vector<double> evaluate_on(const PayoffExpr& g, const DiscreteMeasure& mu);

/// max |g(x) - g(y)| / |x - y| over distinct pairs of points.
double observed_lipschitz(const PayoffExpr& g, const std::vector<Point>& points);

}  // namespace superhedge
