#include "superhedge/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "superhedge/error.hpp"

namespace superhedge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::LevelError: return "LevelError";
    case ErrorKind::ParameterError: return "ParameterError";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::SolverStall: return "SolverStall";
    case ErrorKind::ArbitrageDetected: return "ArbitrageDetected";
    case ErrorKind::NAViolation: return "NAViolation";
    case ErrorKind::QuoteArbitrage: return "QuoteArbitrage";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SizeError: return "SizeError";
    case ErrorKind::StationarityError: return "StationarityError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EvalError: return "EvalError";
    case ErrorKind::LipschitzRequired: return "LipschitzRequired";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::DataError: return "DataError";
  }
  return "Unknown";
}

void ReturnSeries::validate() const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& row = observations[i];
    if (row.size() != d || d == 0) {
      fail(ErrorKind::DomainError, "row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                       " columns, expected " + std::to_string(d));
    }
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        fail(ErrorKind::DomainError, "row " + std::to_string(i) + " has a negative or non-finite return");
      }
    }
  }
}

ReturnSeries ReturnSeries::from_scalars(const std::vector<double>& values, std::string source) {
  ReturnSeries s;
  s.source = std::move(source);
  s.observations.reserve(values.size());
  for (double v : values) s.observations.push_back({v});
  return s;
}

DiscreteMeasure DiscreteMeasure::make(std::vector<Point> atoms, std::vector<double> weights) {
  if (atoms.empty()) fail(ErrorKind::EmptySample, "measure needs at least one atom");
  if (atoms.size() != weights.size()) fail(ErrorKind::ShapeError, "atom and weight counts differ");
  const std::size_t d = atoms.front().size();
  if (d == 0) fail(ErrorKind::ShapeError, "atoms must have dimension >= 1");

  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != d) fail(ErrorKind::ShapeError, "atoms have mixed dimensions");
    for (double c : atoms[i]) {
      if (!std::isfinite(c) || c < 0.0) fail(ErrorKind::DomainError, "atom coordinates must be finite and >= 0");
    }
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) fail(ErrorKind::DomainError, "weights must be >= 0");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "weights sum to " << std::setprecision(17) << total << ", not 1";
    fail(ErrorKind::DomainError, msg.str());
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  DiscreteMeasure m;
  m.dim_ = d;
  for (std::size_t idx : order) {
    if (weights[idx] == 0.0) continue;
    const std::size_t n = m.weights_.size();
    if (n > 0 && std::equal(atoms[idx].begin(), atoms[idx].end(), m.coords_.begin() + (n - 1) * d)) {
      m.weights_.back() += weights[idx];
    } else {
      m.coords_.insert(m.coords_.end(), atoms[idx].begin(), atoms[idx].end());
      m.weights_.push_back(weights[idx]);
    }
  }
  if (m.weights_.empty()) fail(ErrorKind::EmptySample, "all weights are zero");
  const double merged = std::accumulate(m.weights_.begin(), m.weights_.end(), 0.0);
  for (double& w : m.weights_) w /= merged;
  return m;
}

DiscreteMeasure DiscreteMeasure::make_1d(const std::vector<double>& atoms, const std::vector<double>& weights) {
  std::vector<Point> pts;
  pts.reserve(atoms.size());
  for (double a : atoms) pts.push_back({a});
  return make(std::move(pts), weights);
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x) { return make({x}, {1.0}); }

DiscreteMeasure DiscreteMeasure::uniform(const std::vector<Point>& atoms) {
  if (atoms.empty()) fail(ErrorKind::EmptySample, "measure needs at least one atom");
  return make(atoms, std::vector<double>(atoms.size(), 1.0 / static_cast<double>(atoms.size())));
}

DiscreteMeasure DiscreteMeasure::uniform_1d(const std::vector<double>& atoms) {
  if (atoms.empty()) fail(ErrorKind::EmptySample, "measure needs at least one atom");
  return make_1d(atoms, std::vector<double>(atoms.size(), 1.0 / static_cast<double>(atoms.size())));
}

Point DiscreteMeasure::atom_point(std::size_t i) const {
  auto a = atom(i);
  return Point(a.begin(), a.end());
}

std::vector<Point> DiscreteMeasure::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(atom_point(i));
  return out;
}

std::vector<double> DiscreteMeasure::values_1d() const {
  if (dim_ != 1) fail(ErrorKind::UnsupportedDimension, "values_1d requires a one-dimensional measure");
  return coords_;
}

double DiscreteMeasure::min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }

Point DiscreteMeasure::mean() const {
  Point m(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < dim_; ++j) m[j] += weights_[i] * coords_[i * dim_ + j];
  }
  return m;
}

DiscreteMeasure from_samples(const ReturnSeries& series) {
  if (series.empty()) fail(ErrorKind::EmptySample, "return series is empty");
  series.validate();
  const double w = 1.0 / static_cast<double>(series.size());
  return DiscreteMeasure::make(series.observations, std::vector<double>(series.size(), w));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ';' || ch == '\t' || ch == ' ') {
      if (!cur.empty()) fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  is >> out;
  return !is.fail() && is.eof();
}

}  // namespace

ReturnSeries read_series_csv(std::istream& in, std::string source) {
  ReturnSeries series;
  series.source = std::move(source);
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    Point row;
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      fail(ErrorKind::DataError, "non-numeric field on line " + std::to_string(lineno));
    }
    first_content = false;
    series.observations.push_back(std::move(row));
  }
  if (series.empty()) fail(ErrorKind::EmptySample, "no observations in " + series.source);
  series.validate();
  return series;
}

ReturnSeries read_series_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::DataError, "cannot open " + path);
  return read_series_csv(in, path);
}

void write_series_csv(std::ostream& out, const ReturnSeries& series) {
  const std::size_t d = series.dim();
  for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << (d == 1 ? "r" : "r" + std::to_string(j + 1));
  out << '\n';
  out << std::setprecision(17);
  for (const auto& row : series.observations) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

}  // namespace superhedge
