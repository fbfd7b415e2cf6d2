#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = superhedge::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "superhedge_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("plugin estimate on three points") {
  const auto d = write_file("d.csv", "0\n1\n2\n");
  const auto r = call({"estimate", "--method", "plugin", "--data", d, "--payoff", "pos(1-r)"});
  REQUIRE(r.code == 0);
  const auto j = r.doc();
  CHECK(j["schema"] == 1);
  CHECK(j["price"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(j["na_check"]["arbitrage_free"] == true);
  CHECK(j["dual_weights"].size() == 3);
  CHECK(j["config"]["payoff"] == "pos(1-r)");
}

TEST_CASE("check-na reports the arbitrage with a witness") {
  const auto up = write_file("up.csv", "1.1\n1.3\n1.2\n");
  const auto r = call({"check-na", "--data", up});
  CHECK(r.code == 4);
  const auto j = r.doc();
  CHECK(j["arbitrage_free"] == false);
  REQUIRE(j["witness"].size() == 1);
  CHECK(j["witness"][0].get<double>() > 0.0);

  const auto priced = call({"estimate", "--data", up, "--payoff", "r"});
  CHECK(priced.code == 4);
  CHECK(priced.doc()["error"] == "ArbitrageDetected");
}

TEST_CASE("simulate then estimate is deterministic") {
  const auto path = (scratch() / "sim.csv").string();
  const std::vector<std::string> sim{"simulate", "--model",  "lgarch", "--omega", "0.02", "--alpha", "0.8", "--beta",
                                     "0.1",      "--innov",  "t5",     "--n",     "300",  "--seed",  "7",   "--out",
                                     path};
  REQUIRE(call(sim).code == 0);
  const std::string first = slurp(path);
  REQUIRE(call(sim).code == 0);
  CHECK(slurp(path) == first);

  const std::vector<std::string> est{"estimate", "--data", path, "--payoff", "pos(r-1)", "--method", "wasserstein",
                                     "--lipschitz", "1"};
  const auto a = call(est), b = call(est);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = a.doc();
  CHECK(j["lower"].get<double>() <= j["upper"].get<double>());
}

TEST_CASE("flags override the config file and the echo reproduces the run") {
  const auto d = write_file("d2.csv", "0.5\n0.9\n1.2\n1.6\n");
  const auto cfg = write_file("run.cfg", "# test\nmethod=wasserstein\npayoff=pos(r-1)\nlipschitz = 1\ndata=" + d +
                                             "\ngamma=0.3\n");
  const auto saved = (scratch() / "saved.cfg").string();
  const auto a = call({"estimate", "--config", cfg, "--gamma", "0.4", "--save-config", saved});
  REQUIRE(a.code == 0);
  CHECK(a.doc()["config"]["gamma"] == "0.4");
  CHECK(a.doc()["config"]["method"] == "wasserstein");
  const auto b = call({"estimate", "--config", saved});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);

  const auto bad = write_file("bad.cfg", "no_such_key=1\n");
  CHECK(call({"estimate", "--config", bad}).code == 2);
}

TEST_CASE("thread count from the environment wins over the flag") {
  const auto d = write_file("d3.csv", "0\n2\n");
  setenv("SUPERHEDGE_THREADS", "3", 1);
  const auto r = call({"check-na", "--data", d, "--threads", "2"});
  unsetenv("SUPERHEDGE_THREADS");
  REQUIRE(r.code == 0);
  CHECK(r.doc()["config"]["threads"] == "3");
  CHECK(r.doc()["config"]["threads_source"] == "env");
}

TEST_CASE("exit codes by error class") {
  const auto d = write_file("d4.csv", "0\n1\n2\n");
  CHECK(call({}).code == 2);
  CHECK(call({"estimate", "--data", d, "--law", "uniform(0,2)", "--payoff", "r"}).code == 2);
  CHECK(call({"estimate", "--data", d, "--payoff", "r+"}).code == 2);
  CHECK(call({"estimate", "--data", (scratch() / "missing.csv").string(), "--payoff", "r"}).code == 3);
  CHECK(call({"estimate", "--data", d, "--payoff", "(r-1)^2", "--method", "wasserstein"}).code == 2);
  CHECK(call({"simulate", "--alpha", "0.9", "--beta", "0.2", "--n", "10"}).code == 2);
  CHECK(call({"estimate", "--help"}).code == 0);
}

TEST_CASE("numbers carry at most 12 significant digits") {
  const auto d = write_file("d5.csv", "0.3\n1.7\n1.1\n");
  const auto r = call({"estimate", "--data", d, "--payoff", "pos(r-1)/3"});
  REQUIRE(r.code == 0);
  const double price = r.doc()["price"].get<double>();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", price);
  CHECK(std::strtod(buf, nullptr) == price);
}

TEST_CASE("rates, robustness and backtest subcommands") {
  const auto dir = (scratch() / "rates").string();
  const auto r = call({"rates", "--law", "uniform(0,2)", "--payoff", "abs(r-1)", "--Ns", "10,20,40,80,160", "--runs",
                       "50", "--out-dir", dir});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["grid"].size() == 5);
  CHECK(fs::exists(fs::path(dir) / "study.csv"));

  const auto rob = call({"robustness", "--law", "uniform(0,2)", "--perturb", "winf_shift(0)", "--payoff", "abs(r-1)",
                         "--n", "30", "--runs", "10"});
  REQUIRE(rob.code == 0);
  CHECK(rob.doc()["distance"].get<double>() == 0.0);

  std::string flat;
  for (int i = 0; i < 70; ++i) flat += "1\n";
  const auto f = write_file("flat.csv", flat);
  const auto bt = call({"backtest", "--data", f, "--payoff", "pos(r-1)+0.2", "--lipschitz", "1", "--window", "20",
                        "--smoothing", "5"});
  REQUIRE(bt.code == 0);
  for (const auto& v : bt.doc()["plugin"]) CHECK(v.get<double>() == doctest::Approx(0.2));
}
