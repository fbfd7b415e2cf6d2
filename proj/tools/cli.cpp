#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "superhedge/error.hpp"
#include "superhedge/experiments.hpp"
#include "superhedge/law.hpp"
#include "superhedge/measure.hpp"
#include "superhedge/multiperiod.hpp"
#include "superhedge/oneperiod.hpp"
#include "superhedge/parallel.hpp"
#include "superhedge/payoff.hpp"
#include "superhedge/penalty.hpp"
#include "superhedge/simulate.hpp"
#include "superhedge/wasserstein.hpp"
#include "superhedge/winf.hpp"

namespace superhedge::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kThreadsEnv = "SUPERHEDGE_THREADS";

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json points(const std::vector<Point>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(p.size() == 1 ? num(p[0]) : nums(p));
  return a;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::ParameterError:
    case ErrorKind::LevelError:
    case ErrorKind::ParseError:
    case ErrorKind::LipschitzRequired:
    case ErrorKind::StationarityError:
    case ErrorKind::SizeError:
    case ErrorKind::UnsupportedDimension:
      return Config;
    case ErrorKind::EmptySample:
    case ErrorKind::DomainError:
    case ErrorKind::ShapeError:
    case ErrorKind::DataError:
    case ErrorKind::EvalError:
      return Data;
    case ErrorKind::ArbitrageDetected:
    case ErrorKind::NAViolation:
    case ErrorKind::QuoteArbitrage:
    case ErrorKind::Unbounded:
      return Arbitrage;
    case ErrorKind::SolverStall:
      return Solver;
  }
  return Unexpected;
}

struct Options {
  // data source
  std::string data;
  std::string law;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out;
  std::string save_config;

  std::string method = "plugin";
  std::string payoff;
  std::vector<std::string> options;

  // wasserstein
  double p = 1.0;
  std::string beta_rule = "exp-sqrt";
  double beta = 0.05;
  double gamma = 0.5;
  double k = 0.0;
  std::optional<double> lipschitz;
  std::optional<double> box;
  double radius = 0.0;
  std::string branch = "iid";
  double c1 = 1.0, c2 = 1.0, a = 1.0, c = 1.0, q = 10.0, s = 4.0;
  std::optional<double> kappaN;

  // penalty
  std::optional<double> C;
  std::string grid = "auto";
  std::size_t grid_points = 50;
  double tmax = 0.0;
  std::size_t t_points = 64;

  // winf
  double winf_alpha = 1.0;
  double winf_C = 1.0;
  double mesh = 0.0;
  std::optional<double> winf_radius;

  // multiperiod
  std::size_t T = 2;

  // simulate
  std::string model = "lgarch";
  double omega = 0.02, alpha = 0.8, garch_beta = 0.1, alpha2 = 0.0, garch_gamma = 0.0, h0 = 0.0;
  std::string innov = "t5";
  std::string return_map = "gross_clipped";
  std::size_t burn_in = 1000;

  // backtest
  std::size_t window = 50;
  std::size_t smoothing = 10;
  double level = 0.05;
  std::string csv;

  // studies
  std::vector<std::size_t> Ns{10, 100, 1000};
  std::size_t runs = 100;
  std::optional<double> reference;
  std::string out_dir;
  std::string modulus;
  double confidence = 0.05;
  std::string perturb;
};

void add_common(CLI::App* sub, Options& o, bool data_source) {
  sub->add_option("--config", "flat key=value file; explicit flags win");
  if (data_source) {
    sub->add_option("--data", o.data, "CSV of gross returns, one observation per row");
    sub->add_option("--law", o.law, "i.i.d. law to sample instead of --data, e.g. uniform(0,2)");
    sub->add_option("--n", o.n, "sample size for --law");
  }
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--threads", o.threads, std::string("worker threads (0: hardware); ") + kThreadsEnv + " overrides");
  sub->add_option("--out", o.out, "write the JSON result here instead of stdout");
  sub->add_option("--save-config", o.save_config, "write the resolved configuration as key=value");
}

void add_wasserstein(CLI::App* sub, Options& o) {
  sub->add_option("--p", o.p, "Wasserstein order of the concentration radius");
  sub->add_option("--beta-rule", o.beta_rule, "exp-sqrt or fixed")->check(CLI::IsMember({"exp-sqrt", "fixed"}));
  sub->add_option("--beta", o.beta, "confidence for --beta-rule fixed");
  sub->add_option("--gamma", o.gamma, "k = eps^-gamma");
  sub->add_option("--k", o.k, "fixed AV@R parameter k instead of the power rule");
  sub->add_option("--lipschitz", o.lipschitz, "declared Lipschitz constant of the payoff");
  sub->add_option("--box", o.box, "l1 bound on the hedge in the upper estimate");
  sub->add_option("--radius", o.radius, "fixed ball radius instead of the schedule");
  sub->add_option("--branch", o.branch, "iid or markov")->check(CLI::IsMember({"iid", "markov"}));
  sub->add_option("--c1", o.c1);
  sub->add_option("--c2", o.c2);
  sub->add_option("--a", o.a, "exponential moment exponent");
  sub->add_option("--c", o.c, "exponential moment scale");
  sub->add_option("--q", o.q, "moment order (markov)");
  sub->add_option("--s", o.s, "mixing order (markov)");
  sub->add_option("--kappaN", o.kappaN, "moment bound (markov)");
}

void add_estimators(CLI::App* sub, Options& o) {
  add_wasserstein(sub, o);
  sub->add_option("--C", o.C, "penalty weight");
  sub->add_option("--grid", o.grid, "penalty support: auto or a CSV file");
  sub->add_option("--grid-points", o.grid_points, "extra points of the auto grid");
  sub->add_option("--tmax", o.tmax, "upper end of the density-ratio search");
  sub->add_option("--t-points", o.t_points, "density-ratio grid size");
  sub->add_option("--alpha", o.winf_alpha, "density bound of the W-infinity radius");
  sub->add_option("--winf-C", o.winf_C, "W-infinity radius constant (d >= 2)");
  sub->add_option("--mesh", o.mesh, "W-infinity discretisation step");
  sub->add_option("--winf-radius", o.winf_radius, "explicit W-infinity radius");
}

json echo(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "save-config") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() > 1) cfg[name] = res;
      else cfg[name] = res.empty() ? "" : res.back();
    } else if (opt->get_expected_max() > 1) {
      cfg[name] = json::array();
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

std::string config_text(const json& cfg) {
  std::ostringstream os;
  for (const auto& [key, val] : cfg.items()) {
    if (key == "threads_source") continue;
    os << key << '=';
    if (val.is_array()) {
      os << '[';
      for (std::size_t i = 0; i < val.size(); ++i) os << (i ? "," : "") << json(val[i].get<std::string>()).dump();
      os << ']';
    } else {
      os << json(val.get<std::string>()).dump();
    }
    os << '\n';
  }
  return os.str();
}

ReturnSeries load_series(const Options& o) {
  if (o.data.empty() == o.law.empty()) fail(ErrorKind::ConfigError, "give exactly one of --data and --law");
  if (!o.data.empty()) {
    auto s = read_series_csv_file(o.data);
    s.validate();
    return s;
  }
  if (o.n == 0) fail(ErrorKind::ConfigError, "--law needs --n >= 1");
  return simulate_iid(IidSpec{Law::parse(o.law), o.seed, 0}, o.n);
}

WassersteinConfig wasserstein_config(const Options& o, std::size_t dim) {
  WassersteinConfig w;
  w.schedule.p = o.p;
  w.schedule.d = static_cast<int>(dim);
  w.schedule.c1 = o.c1;
  w.schedule.c2 = o.c2;
  w.schedule.a = o.a;
  w.schedule.c = o.c;
  w.schedule.q = o.q;
  w.schedule.s = o.s;
  w.schedule.kappaN = o.kappaN;
  w.branch = o.branch == "markov" ? ScheduleBranch::Markov : ScheduleBranch::Iid;
  if (o.beta_rule == "fixed") {
    w.beta.kind = BetaRule::Kind::Fixed;
    w.beta.beta = o.beta;
  }
  if (o.k > 0.0) {
    w.k.kind = KRule::Kind::Fixed;
    w.k.k = o.k;
  } else {
    w.k.gamma = o.gamma;
  }
  w.fixed_radius = o.radius;
  w.box = o.box;
  w.lipschitz = o.lipschitz;
  w.validate();
  return w;
}

PenaltyConfig penalty_config(const Options& o) {
  PenaltyConfig p;
  p.C = o.C;
  if (o.grid != "auto") p.grid = read_series_csv_file(o.grid).observations;
  p.auto_points = o.grid_points;
  p.t_max = o.tmax;
  p.t_points = o.t_points;
  p.threads = o.threads;
  p.validate();
  return p;
}

WinfConfig winf_config(const Options& o) {
  WinfConfig w;
  w.alpha = o.winf_alpha;
  w.C = o.winf_C;
  w.mesh = o.mesh;
  w.radius_override = o.winf_radius;
  w.validate();
  return w;
}

EstimatorSpec estimator_spec(const Options& o, std::size_t dim) {
  EstimatorSpec est;
  est.method = EstimatorSpec::parse_method(o.method);
  est.wasserstein = wasserstein_config(o, dim);
  est.winf = winf_config(o);
  if (est.method == EstimatorSpec::Method::Penalty) est.penalty = penalty_config(o);
  return est;
}

PayoffExpr need_payoff(const Options& o, std::size_t dim, std::size_t periods = 1) {
  if (o.payoff.empty()) fail(ErrorKind::ConfigError, "--payoff is required");
  return PayoffExpr::parse(o.payoff, dim, periods);
}

json cmd_estimate(const Options& o) {
  const auto series = load_series(o);
  const std::size_t N = series.size();
  const auto mu = from_samples(series);
  json j;
  j["method"] = o.method;
  j["N"] = N;

  if (o.method == "multiperiod") {
    if (mu.dim() != 1) fail(ErrorKind::UnsupportedDimension, "multiperiod pricing takes one-dimensional data");
    MultiperiodProblem prob{o.T, mu, need_payoff(o, 1, o.T)};
    j["price"] = num(multiperiod_plugin(prob));
    j["T"] = o.T;
    j["atoms"] = mu.size();
    return j;
  }

  const auto g = need_payoff(o, mu.dim());
  j["payoff"] = g.to_string();
  if (!g.warnings().empty()) j["warnings"] = g.warnings();

  if (o.method == "plugin") {
    std::vector<OptionQuote> quotes;
    for (const auto& text : o.options) quotes.push_back(OptionQuote::parse(text, mu.dim()));
    const auto na = check_na(mu);
    j["na_check"] = {{"arbitrage_free", na.arbitrage_free}, {"tau", num(na.tau)}};
    if (!na.arbitrage_free) fail(ErrorKind::ArbitrageDetected, "sample admits an arbitrage", na.arbitrage_direction);
    const auto plan = price_primal(mu, g, quotes);
    const auto dual = price_dual(mu, g, quotes);
    j["price"] = num(plan.price);
    j["strategy"] = nums(plan.strategy);
    j["dual_weights"] = nums(dual.dual_weights);
    j["atoms"] = points(mu.points());
    json diag;
    diag["dim"] = mu.dim();
    diag["atoms"] = mu.size();
    diag["dual_price"] = num(dual.price);
    diag["duality_gap"] = num(std::abs(plan.price - dual.price));
    if (mu.dim() == 1 && quotes.empty()) diag["envelope_price"] = num(envelope_price_1d(mu, g).price);
    diag["hedge_min_slack"] = num(verify_superhedge(plan, mu, g, 1e-8, quotes).min_slack);
    j["diagnostics"] = diag;
    return j;
  }
  if (!o.options.empty()) fail(ErrorKind::ConfigError, "--option is only supported by the plugin method");
  if (o.method == "wasserstein") {
    const auto b = estimate_bounds(mu, g, wasserstein_config(o, mu.dim()), N);
    j["lower"] = num(b.lower);
    j["upper"] = num(b.upper);
    j["epsilon"] = num(b.epsilon);
    j["k"] = num(b.k);
    j["H"] = nums(b.H_upper);
    j["H_lower"] = nums(b.H_lower);
    j["lipschitz"] = num(b.lipschitz);
    j["box"] = num(b.box);
    if (!b.warnings.empty()) j["warnings"] = b.warnings;
    return j;
  }
  if (o.method == "penalty") {
    const auto r = penalty_estimate(mu, g, penalty_config(o));
    j["value"] = num(r.value);
    j["t"] = num(r.t);
    j["C"] = num(r.C);
    j["grid_size"] = r.grid.size();
    json prof = json::array();
    for (const auto& [t, v] : r.profile) prof.push_back({num(t), num(v)});
    j["profile"] = prof;
    return j;
  }
  if (o.method == "winf") {
    const auto r = winf_estimate(mu, g, winf_config(o), N);
    j["value"] = num(r.value);
    j["radius"] = num(r.radius);
    j["mesh"] = num(r.mesh);
    j["points"] = r.points;
    j["slope"] = num(r.slope);
    return j;
  }
  fail(ErrorKind::ConfigError, "unknown --method '" + o.method + "'");
}

json cmd_check_na(const Options& o, int& code) {
  const auto mu = from_samples(load_series(o));
  const auto na = check_na(mu);
  json j;
  j["arbitrage_free"] = na.arbitrage_free;
  j["tau"] = num(na.tau);
  j["atoms"] = points(mu.points());
  if (na.arbitrage_free) {
    j["martingale_weights"] = nums(na.martingale_weights);
  } else {
    j["witness"] = nums(na.arbitrage_direction);
    code = Arbitrage;
  }
  return j;
}

GarchSpec garch_spec(const Options& o) {
  GarchSpec s;
  if (o.model == "lgarch") s.variant = GarchVariant::LGarch;
  else if (o.model == "gjr") s.variant = GarchVariant::Gjr;
  else if (o.model == "egarch") s.variant = GarchVariant::EGarch;
  else fail(ErrorKind::ConfigError, "unknown --model '" + o.model + "'");
  s.omega = o.omega;
  s.alpha = o.alpha;
  s.beta = o.garch_beta;
  s.alpha2 = o.alpha2;
  s.gamma = o.garch_gamma;
  s.innovation = Innovation::parse(o.innov);
  s.h0 = o.h0;
  s.seed = o.seed;
  s.burn_in = o.burn_in;
  if (o.return_map == "raw") s.return_map = ReturnMap::Raw;
  else if (o.return_map == "gross") s.return_map = ReturnMap::Gross;
  else if (o.return_map == "gross_clipped") s.return_map = ReturnMap::GrossClipped;
  else fail(ErrorKind::ConfigError, "unknown --return-map '" + o.return_map + "'");
  s.validate();
  return s;
}

json cmd_simulate(const Options& o, std::ostream& out, bool& printed) {
  if (o.n == 0) fail(ErrorKind::ConfigError, "--n must be >= 1");
  SimulatedSeries sim;
  if (o.model == "iid") {
    if (o.law.empty()) fail(ErrorKind::ConfigError, "--model iid needs --law");
    sim.series = simulate_iid(IidSpec{Law::parse(o.law), o.seed, 0}, o.n);
  } else {
    sim = simulate_garch(garch_spec(o), o.n);
  }
  if (o.out.empty()) {
    write_series_csv(out, sim.series);
    printed = true;
    return {};
  }
  std::ofstream f(o.out);
  if (!f) fail(ErrorKind::DataError, "cannot write '" + o.out + "'");
  write_series_csv(f, sim.series);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& p : sim.series.observations) {
    m1 += p[0];
    m2 += p[0] * p[0];
  }
  const double n = static_cast<double>(sim.series.size());
  json j;
  j["n"] = sim.series.size();
  j["clipped"] = sim.clipped;
  j["clipped_fraction"] = num(static_cast<double>(sim.clipped) / n);
  j["mean"] = num(m1 / n);
  j["variance"] = num(m2 / n - (m1 / n) * (m1 / n));
  j["file"] = o.out;
  return j;
}

json cmd_backtest(const Options& o) {
  const auto series = load_series(o);
  if (series.dim() != 1) fail(ErrorKind::UnsupportedDimension, "backtest takes one-dimensional data");
  BacktestConfig cfg;
  cfg.window = o.window;
  cfg.smoothing = o.smoothing;
  cfg.level = o.level;
  cfg.wasserstein = wasserstein_config(o, 1);
  const auto res = rolling_backtest(series, need_payoff(o, 1), cfg);
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) fail(ErrorKind::DataError, "cannot write '" + o.csv + "'");
    f.precision(12);
    f << "time,plugin,wasserstein,plugin_smoothed,wasserstein_smoothed\n";
    for (std::size_t i = 0; i < res.time.size(); ++i)
      f << res.time[i] << ',' << res.plugin[i] << ',' << res.wasserstein[i] << ',' << res.plugin_smoothed[i] << ','
        << res.wasserstein_smoothed[i] << '\n';
  }
  json j;
  j["epsilon"] = num(res.epsilon);
  j["lipschitz"] = num(res.lipschitz);
  j["box"] = num(res.box);
  j["time"] = res.time;
  j["plugin"] = nums(res.plugin);
  j["wasserstein"] = nums(res.wasserstein);
  j["plugin_smoothed"] = nums(res.plugin_smoothed);
  j["wasserstein_smoothed"] = nums(res.wasserstein_smoothed);
  return j;
}

Modulus parse_modulus(const std::string& text, double fallback_L) {
  Modulus m;
  m.L = fallback_L;
  if (text.empty()) return m;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        args.push_back(std::stod(tok));
      } catch (const std::logic_error&) {
        fail(ErrorKind::ConfigError, "bad --modulus '" + text + "'");
      }
    }
  }
  if (kind == "lipschitz" && args.size() <= 1) {
    if (!args.empty()) m.L = args[0];
  } else if (kind == "holder" && args.size() == 2) {
    m.kind = Modulus::Kind::Holder;
    m.L = args[0];
    m.gamma = args[1];
  } else {
    fail(ErrorKind::ConfigError, "--modulus takes lipschitz[:L] or holder:L,gamma");
  }
  return m;
}

json cmd_rates(const Options& o) {
  if (o.law.empty()) fail(ErrorKind::ConfigError, "rates needs --law");
  const auto law = Law::parse(o.law);
  const auto g = need_payoff(o, 1);
  StudyOptions opt;
  opt.runs = o.runs;
  opt.seed = o.seed;
  opt.threads = o.threads;
  opt.reference = o.reference;
  const auto rep = convergence_study(law, g, o.Ns, estimator_spec(o, 1), opt);

  std::ostringstream js;
  write_study_json(js, rep);
  json j = json::parse(js.str());
  j.erase("schema");

  const auto L = g.lipschitz_bound();
  const auto modulus = parse_modulus(o.modulus, L ? *L : 1.0);
  json bounds = json::array();
  for (std::size_t N : rep.Ns) {
    json b{{"N", N}};
    try {
      const auto rb = rate_bound(law, N, modulus, law.bounded(), o.confidence);
      b["dN"] = num(rb.dN);
      b["kappa"] = num(rb.kappa);
      b["bound"] = num(rb.bound);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ParameterError) throw;
      b["bound"] = nullptr;
    }
    bounds.push_back(b);
  }
  j["bounds"] = bounds;

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    std::ofstream csv(std::filesystem::path(o.out_dir) / "study.csv");
    write_study_csv(csv, rep);
    std::ofstream jf(std::filesystem::path(o.out_dir) / "study.json");
    write_study_json(jf, rep);
  }
  return j;
}

json cmd_robustness(const Options& o) {
  if (o.law.empty()) fail(ErrorKind::ConfigError, "robustness needs --law");
  if (o.perturb.empty()) fail(ErrorKind::ConfigError, "robustness needs --perturb");
  if (o.n == 0) fail(ErrorKind::ConfigError, "robustness needs --n >= 1");
  StudyOptions opt;
  opt.runs = o.runs;
  opt.seed = o.seed;
  opt.threads = o.threads;
  const auto rep = robustness_study(Law::parse(o.law), Perturbation::parse(o.perturb), need_payoff(o, 1),
                                    estimator_spec(o, 1), o.n, opt);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  json j;
  j["runs_used"] = rep.base.size();
  j["base_mean"] = num(mean(rep.base));
  j["perturbed_mean"] = num(mean(rep.perturbed));
  j["mean_shift"] = num(rep.mean_shift);
  j["distance"] = num(rep.distance);
  return j;
}

/// Splices the --config file into the argument list as flags placed after the
/// subcommand, skipping keys the command line sets itself.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.push_back(key);
    if (key == "config") {
      if (eq != std::string::npos) path = a.substr(eq + 1);
      else if (i + 1 < args.size()) path = args[i + 1];
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(first, eq - first);
    std::string val = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    val.erase(val.find_last_not_of(" \t\r") + 1);
    if (key == "config" || std::find(given.begin(), given.end(), key) != given.end()) continue;
    std::vector<std::string> values;
    try {
      if (!val.empty() && val.front() == '[') {
        for (const auto& v : json::parse(val)) values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (!val.empty() && val.front() == '"') {
        values.push_back(json::parse(val).get<std::string>());
      } else {
        values.push_back(val);
      }
    } catch (const json::exception&) {
      fail(ErrorKind::ConfigError, path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
    for (const auto& v : values) extra.push_back("--" + key + "=" + v);
  }
  std::vector<std::string> merged;
  std::size_t i = 0;
  while (i < args.size() && args[i].rfind("-", 0) == 0) merged.push_back(args[i++]);
  if (i < args.size()) merged.push_back(args[i++]);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
  return merged;
}

void emit(const json& j, const Options& o, std::ostream& out, bool to_file) {
  const std::string text = j.dump(2) + "\n";
  if (to_file && !o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) fail(ErrorKind::DataError, "cannot write '" + o.out + "'");
    f << text;
  } else {
    out << text;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Superhedging prices and hedged risk estimates from return samples", "superhedge"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto* estimate = app.add_subcommand("estimate", "price a payoff from a sample");
  add_common(estimate, o, true);
  estimate->add_option("--method", o.method, "plugin, wasserstein, penalty, winf or multiperiod")
      ->check(CLI::IsMember({"plugin", "wasserstein", "penalty", "winf", "multiperiod"}));
  estimate->add_option("--payoff", o.payoff, "payoff expression");
  estimate->add_option("--option", o.options, "traded option as expr@price (plugin only)");
  estimate->add_option("--T", o.T, "number of periods (multiperiod)");
  add_estimators(estimate, o);

  auto* simulate = app.add_subcommand("simulate", "simulate a return series");
  add_common(simulate, o, false);
  simulate->add_option("--model", o.model, "lgarch, gjr, egarch or iid");
  simulate->add_option("--law", o.law, "law for --model iid");
  simulate->add_option("--n", o.n, "number of returns");
  simulate->add_option("--omega", o.omega);
  simulate->add_option("--alpha", o.alpha);
  simulate->add_option("--beta", o.garch_beta);
  simulate->add_option("--alpha2", o.alpha2, "gjr asymmetry");
  simulate->add_option("--gamma", o.garch_gamma, "egarch asymmetry");
  simulate->add_option("--innov", o.innov, "t5, t(5), student_t(5) or normal");
  simulate->add_option("--h0", o.h0, "initial variance (<= 0: stationary)");
  simulate->add_option("--return-map", o.return_map, "raw, gross or gross_clipped");
  simulate->add_option("--burn-in", o.burn_in);

  auto* backtest = app.add_subcommand("backtest", "rolling-window hedged AV@R estimates");
  add_common(backtest, o, true);
  backtest->add_option("--payoff", o.payoff, "payoff expression");
  backtest->add_option("--window", o.window);
  backtest->add_option("--smoothing", o.smoothing);
  backtest->add_option("--level", o.level, "AV@R tail level");
  backtest->add_option("--csv", o.csv, "also write the series as CSV");
  add_wasserstein(backtest, o);

  auto* rates = app.add_subcommand("rates", "convergence study against the true price");
  add_common(rates, o, false);
  rates->add_option("--law", o.law, "sampling law");
  rates->add_option("--payoff", o.payoff, "payoff expression");
  rates->add_option("--method", o.method, "estimator");
  rates->add_option("--Ns", o.Ns, "sample sizes")->delimiter(',');
  rates->add_option("--runs", o.runs);
  rates->add_option("--reference", o.reference, "true price, when known");
  rates->add_option("--modulus", o.modulus, "lipschitz[:L] or holder:L,gamma for the rate bound");
  rates->add_option("--confidence", o.confidence, "DKW confidence of the rate bound");
  rates->add_option("--out-dir", o.out_dir, "write study.csv and study.json here");
  add_estimators(rates, o);

  auto* robustness = app.add_subcommand("robustness", "estimator law under a perturbed sampling law");
  add_common(robustness, o, false);
  robustness->add_option("--law", o.law, "base law");
  robustness->add_option("--perturb", o.perturb, "winf_shift(d) or contaminate(lambda,x)");
  robustness->add_option("--payoff", o.payoff, "payoff expression");
  robustness->add_option("--method", o.method, "estimator");
  robustness->add_option("--n", o.n, "sample size");
  robustness->add_option("--runs", o.runs);
  add_estimators(robustness, o);

  auto* checkna = app.add_subcommand("check-na", "test a sample for one-period arbitrage");
  add_common(checkna, o, true);

  std::vector<std::string> merged;
  try {
    merged = merge_config(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return Config;
  }
  std::vector<std::string> argv(merged.rbegin(), merged.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return Config;
  }

  CLI::App* sub = app.get_subcommands().front();
  json cfg = echo(sub);
  cfg["command"] = sub->get_name();
  if (const char* env = std::getenv(kThreadsEnv); env && *env) {
    try {
      o.threads = std::stoul(env);
    } catch (const std::logic_error&) {
      err << "error: " << kThreadsEnv << " must be a nonnegative integer\n";
      return Config;
    }
    cfg["threads"] = std::to_string(o.threads);
    cfg["threads_source"] = "env";
  }

  const std::string name = sub->get_name();
  try {
    if (!o.save_config.empty()) {
      std::ofstream f(o.save_config);
      if (!f) fail(ErrorKind::ConfigError, "cannot write '" + o.save_config + "'");
      json c = cfg;
      c.erase("command");
      f << config_text(c);
    }
    int code = Ok;
    bool printed = false;
    json result;
    if (name == "estimate") result = cmd_estimate(o);
    else if (name == "check-na") result = cmd_check_na(o, code);
    else if (name == "simulate") result = cmd_simulate(o, out, printed);
    else if (name == "backtest") result = cmd_backtest(o);
    else if (name == "rates") result = cmd_rates(o);
    else result = cmd_robustness(o);
    if (!printed) {
      json doc{{"schema", 1}, {"command", name}};
      doc.update(result);
      doc["config"] = cfg;
      emit(doc, o, out, name != "simulate");
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    json doc{{"schema", 1}, {"command", name}, {"error", to_string(e.kind())}, {"message", e.what()}};
    if (!e.witness().empty()) doc["witness"] = nums(e.witness());
    doc["config"] = cfg;
    out << doc.dump(2) << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Unexpected;
  }
}

}  // namespace superhedge::cli
