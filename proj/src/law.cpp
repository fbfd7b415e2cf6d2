#include "superhedge/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "superhedge/error.hpp"

namespace superhedge {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    fail(ErrorKind::LevelError, "normal_quantile needs p in [0,1]");
  }
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Law Law::uniform(double a, double b) {
  if (!(a >= 0.0 && b > a)) fail(ErrorKind::ParameterError, "uniform(a,b) needs 0 <= a < b");
  Law l;
  l.kind_ = Kind::Uniform;
  l.p1_ = a;
  l.p2_ = b;
  return l;
}

Law Law::exponential(double rate) {
  if (!(rate > 0.0)) fail(ErrorKind::ParameterError, "exponential rate must be > 0");
  Law l;
  l.kind_ = Kind::Exponential;
  l.p1_ = rate;
  return l;
}

Law Law::lognormal(double mu, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::ParameterError, "lognormal sigma must be > 0");
  Law l;
  l.kind_ = Kind::LogNormal;
  l.p1_ = mu;
  l.p2_ = sigma;
  return l;
}

Law Law::halfnormal(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::ParameterError, "halfnormal sigma must be > 0");
  Law l;
  l.kind_ = Kind::HalfNormal;
  l.p1_ = sigma;
  return l;
}

Law Law::thinned_uniform(int n) {
  if (n < 0) fail(ErrorKind::ParameterError, "thinned_uniform needs n >= 0");
  Law l;
  l.kind_ = Kind::ThinnedUniform;
  l.p1_ = n;
  return l;
}

Law Law::discrete(DiscreteMeasure m) {
  if (m.dim() != 1) fail(ErrorKind::UnsupportedDimension, "discrete law must be one-dimensional");
  Law l;
  l.kind_ = Kind::Discrete;
  l.atoms_ = std::move(m);
  return l;
}

double Law::cdf(double x) const {
  switch (kind_) {
    case Kind::Uniform:
      return std::clamp((x - p1_) / (p2_ - p1_), 0.0, 1.0);
    case Kind::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-p1_ * x);
    case Kind::LogNormal:
      return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p1_) / p2_);
    case Kind::HalfNormal:
      return x <= 0.0 ? 0.0 : std::erf(x / (p1_ * std::numbers::sqrt2));
    case Kind::ThinnedUniform: {
      const double e = p1_ + 1.0;
      if (x <= 0.0) return 0.0;
      if (x <= 1.0) return 0.5 * std::pow(x, e);
      if (x < 2.0) return 1.0 - 0.5 * std::pow(2.0 - x, e);
      return 1.0;
    }
    case Kind::Discrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_->size() && atoms_->value(i) <= x; ++i) acc += atoms_->weight(i);
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

double Law::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::LevelError, "quantile level must lie in [0,1]");
  switch (kind_) {
    case Kind::Uniform:
      return p1_ + p * (p2_ - p1_);
    case Kind::Exponential:
      return p >= 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-p) / p1_;
    case Kind::LogNormal:
      if (p <= 0.0) return 0.0;
      return std::exp(p1_ + p2_ * normal_quantile(p));
    case Kind::HalfNormal:
      if (p <= 0.0) return 0.0;
      return p1_ * normal_quantile(0.5 * (1.0 + p));
    case Kind::ThinnedUniform: {
      const double e = 1.0 / (p1_ + 1.0);
      if (p <= 0.5) return std::pow(2.0 * p, e);
      return 2.0 - std::pow(2.0 * (1.0 - p), e);
    }
    case Kind::Discrete: {
      if (p <= 0.0) return atoms_->value(0);
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_->size(); ++i) {
        acc += atoms_->weight(i);
        if (acc >= p - 1e-15) return atoms_->value(i);
      }
      return atoms_->value(atoms_->size() - 1);
    }
  }
  return 0.0;
}

double Law::mean() const {
  switch (kind_) {
    case Kind::Uniform: return 0.5 * (p1_ + p2_);
    case Kind::Exponential: return 1.0 / p1_;
    case Kind::LogNormal: return std::exp(p1_ + 0.5 * p2_ * p2_);
    case Kind::HalfNormal: return p1_ * std::sqrt(2.0 / std::numbers::pi);
    case Kind::ThinnedUniform: return 1.0;
    case Kind::Discrete: return atoms_->mean()[0];
  }
  return 0.0;
}

bool Law::bounded() const {
  return kind_ == Kind::Uniform || kind_ == Kind::ThinnedUniform || kind_ == Kind::Discrete;
}

double Law::support_min() const { return quantile(0.0); }

double Law::support_max() const {
  switch (kind_) {
    case Kind::Uniform: return p2_;
    case Kind::ThinnedUniform: return 2.0;
    case Kind::Discrete: return atoms_->value(atoms_->size() - 1);
    default: return std::numeric_limits<double>::infinity();
  }
}

double Law::sample(double u) const { return quantile(u); }

std::string Law::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Uniform: os << "uniform(" << p1_ << "," << p2_ << ")"; break;
    case Kind::Exponential: os << "exp(" << p1_ << ")"; break;
    case Kind::LogNormal: os << "lognormal(" << p1_ << "," << p2_ << ")"; break;
    case Kind::HalfNormal: os << "halfnormal(" << p1_ << ")"; break;
    case Kind::ThinnedUniform: os << "thinned(" << static_cast<int>(p1_) << ")"; break;
    case Kind::Discrete: {
      os << "discrete(";
      for (std::size_t i = 0; i < atoms_->size(); ++i) {
        os << (i ? "," : "") << atoms_->value(i) << ":" << atoms_->weight(i);
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_num(const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::ConfigError, "bad number in law spec: '" + s + "'");
  }
}

}  // namespace

Law Law::parse(const std::string& text) {
  const auto open = text.find('(');
  std::string name = text.substr(0, open);
  std::vector<std::string> args;
  if (open != std::string::npos) {
    const auto close = text.rfind(')');
    if (close == std::string::npos || close < open) fail(ErrorKind::ConfigError, "unbalanced law spec: " + text);
    args = split_args(text.substr(open + 1, close - open - 1));
  }
  auto need = [&](std::size_t n) {
    if (args.size() != n) fail(ErrorKind::ConfigError, "law '" + name + "' expects " + std::to_string(n) + " arguments");
  };
  if (name == "uniform") {
    need(2);
    return uniform(to_num(args[0]), to_num(args[1]));
  }
  if (name == "exp" || name == "exponential") {
    if (args.empty()) return exponential(1.0);
    need(1);
    return exponential(to_num(args[0]));
  }
  if (name == "lognormal") {
    if (args.empty()) return lognormal(0.0, 1.0);
    need(2);
    return lognormal(to_num(args[0]), to_num(args[1]));
  }
  if (name == "halfnormal") {
    if (args.empty()) return halfnormal(1.0);
    need(1);
    return halfnormal(to_num(args[0]));
  }
  if (name == "thinned") {
    need(1);
    return thinned_uniform(static_cast<int>(to_num(args[0])));
  }
  if (name == "discrete") {
    if (args.empty()) fail(ErrorKind::ConfigError, "discrete law needs points");
    std::vector<double> pts, ws;
    for (const auto& a : args) {
      const auto colon = a.find(':');
      pts.push_back(to_num(a.substr(0, colon)));
      ws.push_back(colon == std::string::npos ? 1.0 : to_num(a.substr(colon + 1)));
    }
    double total = 0.0;
    for (double w : ws) total += w;
    for (double& w : ws) w /= total;
    return discrete(DiscreteMeasure::make_1d(pts, ws));
  }
  fail(ErrorKind::ConfigError, "unknown law '" + name + "'");
}

}  // namespace superhedge
