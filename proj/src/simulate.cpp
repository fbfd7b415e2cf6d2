#include "superhedge/simulate.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "superhedge/error.hpp"

namespace superhedge {

namespace {

// Marsaglia-Tsang gamma(shape, 1); shape < 1 via the u^(1/shape) boost.
double draw_gamma(CounterRng& rng, double shape) {
  if (shape < 1.0) return draw_gamma(rng, shape + 1.0) * std::pow(rng.uniform(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = draw_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

std::string strip(std::string s) {
  std::string out;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

Innovation Innovation::parse(const std::string& text) {
  const std::string s = strip(text);
  Innovation in;
  if (s == "normal" || s == "gaussian" || s == "n") {
    in.kind = Kind::Normal;
    return in;
  }
  std::string num;
  if (s.rfind("student_t(", 0) == 0 && s.back() == ')') num = s.substr(10, s.size() - 11);
  else if (s.rfind("t(", 0) == 0 && s.back() == ')') num = s.substr(2, s.size() - 3);
  else if (s.size() > 1 && s[0] == 't') num = s.substr(1);
  else fail(ErrorKind::ParseError, "unknown innovation '" + text + "' (use t<df> or normal)");
  try {
    std::size_t used = 0;
    in.df = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(num);
  } catch (const std::logic_error&) {
    fail(ErrorKind::ParseError, "bad degrees of freedom in '" + text + "'");
  }
  if (!(in.df > 2.0)) fail(ErrorKind::ParameterError, "student-t innovations need df > 2 for a finite variance");
  return in;
}

double draw_normal(CounterRng& rng) { return normal_quantile(rng.uniform()); }

double draw_innovation(CounterRng& rng, const Innovation& innov) {
  const double z = draw_normal(rng);
  if (innov.kind == Innovation::Kind::Normal) return z;
  const double chi2 = 2.0 * draw_gamma(rng, innov.df / 2.0);
  // sqrt((df-2)/df) * z / sqrt(chi2/df) = z * sqrt((df-2)/chi2)
  return z * std::sqrt((innov.df - 2.0) / chi2);
}

double innovation_abs_mean(const Innovation& innov) {
  if (innov.kind == Innovation::Kind::Normal) return std::sqrt(2.0 / std::numbers::pi);
  const double v = innov.df;
  const double t_abs = 2.0 * std::sqrt(v) * std::exp(std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0)) /
                       (std::sqrt(std::numbers::pi) * (v - 1.0));
  return t_abs * std::sqrt((v - 2.0) / v);
}

void GarchSpec::validate() const {
  if (innovation.kind == Innovation::Kind::StudentT && !(innovation.df > 2.0))
    fail(ErrorKind::ParameterError, "student-t innovations need df > 2");
  switch (variant) {
    case GarchVariant::LGarch:
    case GarchVariant::Gjr: {
      if (!(omega > 0.0) || alpha < 0.0 || beta < 0.0 || alpha2 < 0.0)
        fail(ErrorKind::ParameterError, "garch needs omega > 0 and nonnegative alpha, beta");
      // E[max(0, -eta)^2] = 1/2 for symmetric unit-variance innovations
      const double persistence = beta + alpha + (variant == GarchVariant::Gjr ? 0.5 * alpha2 : 0.0);
      if (!(persistence < 1.0)) {
        fail(ErrorKind::StationarityError,
             variant == GarchVariant::LGarch
                 ? "lgarch requires beta + alpha < 1 (got " + std::to_string(persistence) + ")"
                 : "gjr requires beta + alpha + alpha2/2 < 1 (got " + std::to_string(persistence) + ")");
      }
      break;
    }
    case GarchVariant::EGarch:
      if (!(std::abs(beta) < 1.0)) fail(ErrorKind::StationarityError, "egarch requires |beta| < 1");
      break;
  }
}

double GarchSpec::stationary_variance() const {
  switch (variant) {
    case GarchVariant::LGarch: return omega / (1.0 - alpha - beta);
    case GarchVariant::Gjr: return omega / (1.0 - alpha - beta - 0.5 * alpha2);
    case GarchVariant::EGarch: return std::exp(omega / (1.0 - beta));
  }
  return 0.0;
}

SimulatedSeries simulate_garch_segments(const std::vector<std::pair<GarchSpec, std::size_t>>& segments) {
  if (segments.empty()) fail(ErrorKind::ParameterError, "no simulation segments");
  for (const auto& [spec, n] : segments) spec.validate();
  const GarchSpec& first = segments.front().first;
  CounterRng rng(first.seed);
  double h = first.h0 > 0.0 ? first.h0 : first.stationary_variance();
  double r = 0.0, eta = 0.0;
  bool started = false;
  SimulatedSeries out;

  auto step = [&](const GarchSpec& s) {
    if (started) {
      if (s.variant == GarchVariant::EGarch) {
        h = std::exp(s.omega + s.beta * std::log(h) + s.alpha * (std::abs(eta) - innovation_abs_mean(s.innovation)) +
                     s.gamma * eta);
      } else {
        h = s.omega + s.beta * h + s.alpha * r * r;
        if (s.variant == GarchVariant::Gjr) h += s.alpha2 * (r < 0.0 ? r * r : 0.0);
      }
    }
    started = true;
    eta = draw_innovation(rng, s.innovation);
    r = eta * std::sqrt(h);
  };

  for (std::size_t b = 0; b < first.burn_in; ++b) step(first);
  for (const auto& [spec, n] : segments) {
    for (std::size_t i = 0; i < n; ++i) {
      step(spec);
      double v = r;
      if (spec.return_map != ReturnMap::Raw) {
        v = 1.0 + r;
        if (v < 0.0) {
          if (spec.return_map == ReturnMap::Gross) {
            fail(ErrorKind::DomainError, "gross return below zero at step " + std::to_string(out.series.size()) +
                                             "; use the clipped map");
          }
          v = 0.0;
          ++out.clipped;
        }
      }
      out.series.observations.push_back({v});
    }
  }
  out.series.source = "garch";
  return out;
}

SimulatedSeries simulate_garch(const GarchSpec& spec, std::size_t N) {
  if (N == 0) fail(ErrorKind::ParameterError, "simulation length must be positive");
  return simulate_garch_segments({{spec, N}});
}

ReturnSeries simulate_iid(const IidSpec& spec, std::size_t N) {
  if (N == 0) fail(ErrorKind::ParameterError, "simulation length must be positive");
  if (spec.law.support_min() < 0.0) fail(ErrorKind::ParameterError, "return law must live on [0, inf)");
  CounterRng rng(spec.seed, spec.stream);
  ReturnSeries out;
  out.source = spec.law.describe();
  out.observations.reserve(N);
  for (std::size_t i = 0; i < N; ++i) out.observations.push_back({spec.law.sample(rng.uniform())});
  return out;
}

}  // namespace superhedge
