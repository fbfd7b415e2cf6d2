#include "superhedge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "superhedge/distance.hpp"
#include "superhedge/error.hpp"
#include "superhedge/oneperiod.hpp"
#include "superhedge/parallel.hpp"
#include "superhedge/rng.hpp"

namespace superhedge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::vector<double> draw_sample(const Law& law, std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  CounterRng rng(seed, stream);
  std::vector<double> xs(n);
  for (auto& x : xs) x = law.sample(rng.uniform());
  return xs;
}

DiscreteMeasure empirical(const std::vector<double>& xs, std::size_t n) {
  return from_samples(ReturnSeries::from_scalars(std::vector<double>(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n))));
}

double estimate_or_nan(const EstimatorSpec& est, const DiscreteMeasure& mu, const PayoffExpr& g, std::size_t N) {
  try {
    return est.estimate(mu, g, N);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ArbitrageDetected || e.kind() == ErrorKind::NAViolation ||
        e.kind() == ErrorKind::Unbounded)
      return kNaN;
    throw;
  }
}

}  // namespace

DiscreteMeasure balayage_1d(const DiscreteMeasure& Q, const std::vector<double>& support) {
  if (support.size() < 2) fail(ErrorKind::ConfigError, "balayage needs at least two support points");
  for (std::size_t i = 1; i < support.size(); ++i)
    if (!(support[i] > support[i - 1])) fail(ErrorKind::ConfigError, "balayage support must be strictly increasing");
  if (Q.size() == 0) fail(ErrorKind::EmptySample, "balayage of an empty measure");
  if (Q.dim() != 1) fail(ErrorKind::UnsupportedDimension, "balayage is one-dimensional");
  std::vector<double> w(support.size(), 0.0);
  for (std::size_t a = 0; a < Q.size(); ++a) {
    const double x = Q.value(a), q = Q.weight(a);
    if (x <= support.front()) {
      w.front() += q;
    } else if (x >= support.back()) {
      w.back() += q;
    } else {
      const auto it = std::upper_bound(support.begin(), support.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - support.begin());
      const double lam = (x - support[i - 1]) / (support[i] - support[i - 1]);
      w[i] += lam * q;
      w[i - 1] += q - lam * q;
    }
  }
  return DiscreteMeasure::make_1d(support, w);
}

double Modulus::operator()(double x) const {
  switch (kind) {
    case Kind::Lipschitz: return L * x;
    case Kind::Holder: return L * std::pow(x, gamma);
    case Kind::Table: {
      if (table.empty()) fail(ErrorKind::ParameterError, "empty modulus table");
      if (x <= table.front().first) return table.front().second;
      for (std::size_t i = 1; i < table.size(); ++i) {
        if (x <= table[i].first) {
          const auto [x0, y0] = table[i - 1];
          const auto [x1, y1] = table[i];
          return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
      }
      return table.back().second;
    }
  }
  return 0.0;
}

RateBound rate_bound(const Law& law, std::size_t N, const Modulus& delta, bool bounded, double beta) {
  if (N == 0) fail(ErrorKind::ParameterError, "rate bound needs N >= 1");
  if (!(beta > 0.0 && beta < 1.0)) fail(ErrorKind::ParameterError, "confidence level beta must lie in (0, 1)");
  if (delta.kind != Modulus::Kind::Table && !(delta.L >= 0.0)) fail(ErrorKind::ParameterError, "modulus constant must be nonnegative");
  RateBound rb;
  rb.dN = std::sqrt(std::log(2.0 / beta) / (2.0 * static_cast<double>(N)));
  if (rb.dN > 1.0 / 3.0) fail(ErrorKind::ParameterError, "N is too small for a DKW band below 1/3");
  rb.kappa = kappa_interquantile(law, rb.dN, bounded);
  rb.modulus_term = delta(rb.kappa);
  if (!bounded) rb.tail_term = 1.0 / law.quantile(1.0 - rb.dN);
  rb.bound = rb.modulus_term + rb.tail_term;
  return rb;
}

double reference_price(const Law& law, const PayoffExpr& g, bool* proxy) {
  if (proxy) *proxy = false;
  if (law.atoms()) return envelope_price_1d(*law.atoms(), g).price;
  const double a = law.support_min();
  double b = law.support_max();
  std::vector<double> xs;
  const double near = std::isfinite(b) ? b : a + 10.0;
  const std::size_t fine = 200000;
  for (std::size_t i = 0; i <= fine; ++i) xs.push_back(a + (near - a) * static_cast<double>(i) / fine);
  if (!std::isfinite(b)) {
    if (proxy) *proxy = true;
    b = 1e12;
    for (double x = near * 1.01; x < b; x *= 1.01) xs.push_back(x);
    xs.push_back(b);
  }
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = g.eval_scalar(xs[i]);
  return concave_envelope_at(xs, ys, 1.0).value;
}

EstimatorSpec::Method EstimatorSpec::parse_method(const std::string& name) {
  if (name == "plugin") return Method::Plugin;
  if (name == "wasserstein" || name == "wasserstein-upper") return Method::WassersteinUpper;
  if (name == "wasserstein-lower") return Method::WassersteinLower;
  if (name == "winf") return Method::Winf;
  if (name == "penalty") return Method::Penalty;
  fail(ErrorKind::ConfigError, "unknown estimator '" + name + "'");
}

const char* to_string(EstimatorSpec::Method m) {
  switch (m) {
    case EstimatorSpec::Method::Plugin: return "plugin";
    case EstimatorSpec::Method::WassersteinLower: return "wasserstein-lower";
    case EstimatorSpec::Method::WassersteinUpper: return "wasserstein";
    case EstimatorSpec::Method::Winf: return "winf";
    case EstimatorSpec::Method::Penalty: return "penalty";
  }
  return "?";
}

double EstimatorSpec::estimate(const DiscreteMeasure& mu, const PayoffExpr& g, std::size_t N) const {
  switch (method) {
    case Method::Plugin:
      return mu.dim() == 1 ? envelope_price_1d(mu, g).price : price_primal(mu, g).price;
    case Method::WassersteinLower: return estimate_bounds(mu, g, wasserstein, N).lower;
    case Method::WassersteinUpper: return estimate_bounds(mu, g, wasserstein, N).upper;
    case Method::Winf: return winf_estimate(mu, g, winf, N).value;
    case Method::Penalty: return penalty_estimate(mu, g, penalty).value;
  }
  return kNaN;
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit f;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (std::isfinite(x[i]) && std::isfinite(y[i])) pts.emplace_back(x[i], y[i]);
  f.points = pts.size();
  if (pts.size() < 2) {
    f.slope = f.se = kNaN;
    return f;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [a, b] : pts) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (const auto& [a, b] : pts) rss += std::pow(b - f.intercept - f.slope * a, 2);
  f.se = pts.size() > 2 ? std::sqrt(rss / static_cast<double>(pts.size() - 2) / sxx) : kNaN;
  return f;
}

StudyReport convergence_study(const Law& law, const PayoffExpr& g, const std::vector<std::size_t>& Ns,
                              const EstimatorSpec& est, const StudyOptions& opt) {
  if (Ns.empty()) fail(ErrorKind::ParameterError, "empty N grid");
  if (opt.runs < 1) fail(ErrorKind::ParameterError, "runs must be >= 1");
  StudyReport rep;
  rep.study = "convergence";
  rep.Ns = Ns;
  std::sort(rep.Ns.begin(), rep.Ns.end());
  if (rep.Ns.front() == 0) fail(ErrorKind::ParameterError, "sample sizes must be positive");
  if (opt.reference) rep.reference = *opt.reference;
  else rep.reference = reference_price(law, g, &rep.reference_proxy);
  const std::size_t nmax = rep.Ns.back();

  const auto per_run = parallel_map(opt.runs, opt.threads, [&](std::size_t r) {
    const auto xs = draw_sample(law, opt.seed, r, nmax);
    std::vector<double> v(rep.Ns.size());
    for (std::size_t i = 0; i < rep.Ns.size(); ++i) v[i] = estimate_or_nan(est, empirical(xs, rep.Ns[i]), g, rep.Ns[i]);
    return v;
  });

  const std::size_t K = rep.Ns.size();
  rep.values.assign(K, std::vector<double>(opt.runs));
  rep.mean.assign(K, 0.0);
  rep.sd.assign(K, 0.0);
  rep.se.assign(K, 0.0);
  rep.skipped.assign(K, 0);
  for (std::size_t i = 0; i < K; ++i) {
    double s = 0.0, s2 = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < opt.runs; ++r) {
      const double v = per_run[r][i];
      rep.values[i][r] = v;
      if (!std::isfinite(v)) {
        ++rep.skipped[i];
        continue;
      }
      s += v;
      ++n;
    }
    rep.mean[i] = n ? s / static_cast<double>(n) : kNaN;
    for (std::size_t r = 0; r < opt.runs; ++r)
      if (std::isfinite(per_run[r][i])) s2 += std::pow(per_run[r][i] - rep.mean[i], 2);
    rep.sd[i] = n > 1 ? std::sqrt(s2 / static_cast<double>(n - 1)) : 0.0;
    rep.se[i] = n > 0 ? rep.sd[i] / std::sqrt(static_cast<double>(n)) : kNaN;
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 1; i < K; ++i) {
    const double gap = std::abs(rep.reference - rep.mean[i]);
    if (gap > 0.0 && std::isfinite(gap)) {
      lx.push_back(std::log(static_cast<double>(rep.Ns[i])));
      ly.push_back(std::log(gap));
    }
  }
  const auto fit = fit_slope(lx, ly);
  rep.slope_points = fit.points;
  if (fit.points >= 4) {
    rep.slope = fit.slope;
    rep.slope_se = fit.se;
  } else {
    rep.slope = rep.slope_se = kNaN;
  }
  rep.slope_lo = rep.slope - 2.0 * rep.slope_se;
  rep.slope_hi = rep.slope + 2.0 * rep.slope_se;

  rep.config = {{"law", law.describe()},          {"payoff", g.to_string()},
                {"method", to_string(est.method)}, {"runs", std::to_string(opt.runs)},
                {"seed", std::to_string(opt.seed)}, {"reference", fmt(rep.reference)}};
  return rep;
}

Perturbation Perturbation::parse(const std::string& text) {
  Perturbation p;
  auto args = [&](const std::string& prefix) {
    std::vector<double> out;
    std::string body = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::logic_error&) {
        fail(ErrorKind::ParseError, "bad perturbation argument in '" + text + "'");
      }
    }
    return out;
  };
  if (text.rfind("winf_shift(", 0) == 0 && text.back() == ')') {
    const auto a = args("winf_shift(");
    if (a.size() != 1 || !(a[0] >= 0.0)) fail(ErrorKind::ParameterError, "winf_shift takes one nonnegative size");
    p.kind = Kind::WinfShift;
    p.delta = a[0];
  } else if (text.rfind("contaminate(", 0) == 0 && text.back() == ')') {
    const auto a = args("contaminate(");
    if (a.size() != 2 || !(a[0] >= 0.0 && a[0] <= 1.0) || !(a[1] >= 0.0))
      fail(ErrorKind::ParameterError, "contaminate takes a weight in [0,1] and a nonnegative point");
    p.kind = Kind::Contaminate;
    p.lambda = a[0];
    p.x = a[1];
  } else {
    fail(ErrorKind::ParseError, "unknown perturbation '" + text + "' (winf_shift(d) or contaminate(l,x))");
  }
  return p;
}

std::string Perturbation::describe() const {
  return kind == Kind::WinfShift ? "winf_shift(" + fmt(delta) + ")" : "contaminate(" + fmt(lambda) + "," + fmt(x) + ")";
}

RobustnessReport robustness_study(const Law& law, const Perturbation& pert, const PayoffExpr& g,
                                  const EstimatorSpec& est, std::size_t N, const StudyOptions& opt) {
  if (N == 0 || opt.runs < 1) fail(ErrorKind::ParameterError, "robustness study needs N >= 1 and runs >= 1");
  const auto pairs = parallel_map(opt.runs, opt.threads, [&](std::size_t r) {
    const auto xs = draw_sample(law, opt.seed, r, N);
    std::vector<double> ys = xs;
    if (pert.kind == Perturbation::Kind::WinfShift) {
      for (auto& y : ys) y += pert.delta;
    } else {
      CounterRng coin(opt.seed ^ 0x5bd1e995ULL, r);
      for (auto& y : ys)
        if (coin.uniform() < pert.lambda) y = pert.x;
    }
    return std::make_pair(estimate_or_nan(est, empirical(xs, N), g, N), estimate_or_nan(est, empirical(ys, N), g, N));
  });
  RobustnessReport rep;
  for (const auto& [a, b] : pairs) {
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    rep.base.push_back(a);
    rep.perturbed.push_back(b);
  }
  if (rep.base.empty()) fail(ErrorKind::DataError, "every run failed to produce an estimate");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < rep.base.size(); ++i) {
    ma += rep.base[i];
    mb += rep.perturbed[i];
  }
  rep.mean_shift = (mb - ma) / static_cast<double>(rep.base.size());
  rep.distance = wasserstein_1d(DiscreteMeasure::uniform_1d(rep.base), DiscreteMeasure::uniform_1d(rep.perturbed));
  rep.config = {{"law", law.describe()},          {"perturbation", pert.describe()},
                {"payoff", g.to_string()},         {"method", to_string(est.method)},
                {"N", std::to_string(N)},          {"runs", std::to_string(opt.runs)},
                {"seed", std::to_string(opt.seed)}};
  return rep;
}

BacktestResult rolling_backtest(const ReturnSeries& series, const PayoffExpr& g, const BacktestConfig& cfg) {
  if (cfg.window < 1 || cfg.smoothing < 1) fail(ErrorKind::ParameterError, "window and smoothing must be positive");
  if (series.size() < cfg.window + cfg.smoothing)
    fail(ErrorKind::DataError, "series shorter than window + smoothing");
  if (!(cfg.level > 0.0 && cfg.level <= 1.0)) fail(ErrorKind::LevelError, "AV@R level must lie in (0, 1]");
  series.validate();
  cfg.wasserstein.validate();
  BacktestResult res;
  res.lipschitz = resolve_lipschitz(g, cfg.wasserstein.lipschitz);
  res.box = cfg.wasserstein.box.value_or(res.lipschitz);
  res.epsilon = cfg.wasserstein.epsilon(cfg.window);
  const double correction = (res.lipschitz + res.box) * res.epsilon / cfg.level;
  for (std::size_t end = cfg.window; end <= series.size(); ++end) {
    ReturnSeries win;
    win.observations.assign(series.observations.begin() + static_cast<std::ptrdiff_t>(end - cfg.window),
                            series.observations.begin() + static_cast<std::ptrdiff_t>(end));
    const auto mu = from_samples(win);
    const auto gv = evaluate_on(g, mu);
    res.time.push_back(end - 1);
    res.plugin.push_back(avar_hedged(mu, gv, cfg.level).value);
    res.wasserstein.push_back(avar_hedged(mu, gv, cfg.level, res.box).value + correction);
  }
  auto smooth = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += v[i];
      if (i >= cfg.smoothing) s -= v[i - cfg.smoothing];
      out[i] = s / static_cast<double>(std::min(i + 1, cfg.smoothing));
    }
    return out;
  };
  res.plugin_smoothed = smooth(res.plugin);
  res.wasserstein_smoothed = smooth(res.wasserstein);
  return res;
}

void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << "study,N,run,value\n";
  out.precision(12);
  for (std::size_t i = 0; i < report.Ns.size(); ++i)
    for (std::size_t r = 0; r < report.values[i].size(); ++r)
      out << report.study << ',' << report.Ns[i] << ',' << r << ',' << report.values[i][r] << '\n';
}

void write_study_json(std::ostream& out, const StudyReport& report) {
  auto num = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(fmt(v));
  };
  nlohmann::json j;
  j["schema"] = 1;
  j["study"] = report.study;
  j["reference"] = num(report.reference);
  j["reference_proxy"] = report.reference_proxy;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.Ns.size(); ++i) {
    rows.push_back({{"N", report.Ns[i]},
                    {"mean", num(report.mean[i])},
                    {"sd", num(report.sd[i])},
                    {"se", num(report.se[i])},
                    {"gap", num(report.reference - report.mean[i])},
                    {"skipped", report.skipped[i]}});
  }
  j["grid"] = rows;
  j["slope"] = {{"value", num(report.slope)},
                {"se", num(report.slope_se)},
                {"band", {num(report.slope_lo), num(report.slope_hi)}},
                {"points", report.slope_points}};
  j["config"] = report.config;
  out << j.dump(2) << '\n';
}

}  // namespace superhedge
