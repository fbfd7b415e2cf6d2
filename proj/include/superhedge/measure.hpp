#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace superhedge {

using Point = std::vector<double>;

/// Ordered sample path r_1, ..., r_N of gross returns (1.02 = +2%).
struct ReturnSeries {
  std::vector<Point> observations;
  std::string source;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }
  std::size_t dim() const { return observations.empty() ? 0 : observations.front().size(); }

  /// Throws DomainError on negative entries or ragged rows.
  void validate() const;
  static ReturnSeries from_scalars(const std::vector<double>& values, std::string source = {});
};

/// Finitely supported probability measure on the nonnegative orthant.
///
/// Atoms are kept in lexicographic order with exact duplicates merged, so two
/// measures describing the same law compare equal member-wise. Weights are
/// strictly positive and sum to one.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Builds the canonical form. Weights within 1e-9 of summing to one are
  /// renormalised; anything further off is rejected. Zero weights are dropped.
  static DiscreteMeasure make(std::vector<Point> atoms, std::vector<double> weights);
  static DiscreteMeasure make_1d(const std::vector<double>& atoms, const std::vector<double>& weights);
  static DiscreteMeasure dirac(const Point& x);
  static DiscreteMeasure uniform(const std::vector<Point>& atoms);
  static DiscreteMeasure uniform_1d(const std::vector<double>& atoms);

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> atom(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  Point atom_point(std::size_t i) const;
  /// Coordinate of atom i for one-dimensional measures.
  double value(std::size_t i) const { return coords_[i * dim_]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<Point> points() const;
  /// Sorted atom coordinates; requires dim() == 1.
  std::vector<double> values_1d() const;

  double min_weight() const;
  Point mean() const;
  bool operator==(const DiscreteMeasure& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// Empirical measure (1/N) Σ δ_{r_i}; duplicates merge.
DiscreteMeasure from_samples(const ReturnSeries& series);

/// Reads a return series: optional header, one observation per row,
/// comma/semicolon/whitespace separated numeric columns.
ReturnSeries read_series_csv(std::istream& in, std::string source = {});
ReturnSeries read_series_csv_file(const std::string& path);
void write_series_csv(std::ostream& out, const ReturnSeries& series);

}  // namespace superhedge
