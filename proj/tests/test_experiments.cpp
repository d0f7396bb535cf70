#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rrg/errors.hpp"
#include "rrg/experiments.hpp"

using namespace rrg;

namespace {

std::string jsonl(const ExperimentRecord& r) {
  std::ostringstream os;
  r.write_jsonl(os);
  return os.str();
}

std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(RRG_CLI_PATH) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ExperimentConfig small_cycles(double beta, std::uint64_t seed) {
  ExperimentConfig c;
  c.n = 300;
  c.d = 3;
  c.beta = beta;
  c.reps = 400;
  c.lmax = 4;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config parsing and overrides") {
  const auto path = temp_file("rrg_cfg_test.txt");
  {
    std::ofstream f(path);
    f << "# comment\n n = 40\nd=4 # trailing\nbeta = 0.25\nmcmc-steps = 9\nplanted_method = mcmc\n";
  }
  auto c = ExperimentConfig::from_file(path.string());
  CHECK(c.n == 40);
  CHECK(c.d == 4);
  CHECK(c.beta == 0.25);
  CHECK(c.mcmc_steps == 9);
  CHECK(c.planted_method == "mcmc");
  c.apply({{"n", "60"}, {"seed", "17"}});
  CHECK(c.n == 60);
  CHECK(c.d == 4);
  CHECK(c.seed == 17);
  CHECK_THROWS_AS(c.apply({{"colour", "red"}}), std::invalid_argument);
  CHECK_THROWS_AS(c.apply({{"n", "many"}}), std::invalid_argument);
  {
    std::ofstream f(path);
    f << "n 40\n";
  }
  CHECK_THROWS_AS(ExperimentConfig::from_file(path.string()), std::invalid_argument);
  CHECK_THROWS(ExperimentConfig::from_file("/nonexistent/rrg.cfg"));
  const auto j = c.to_json();
  CHECK(j["n"] == 60);
  CHECK(j["seed"] == 17);
  CHECK(j.contains("burnin"));
  std::filesystem::remove(path);
}

TEST_CASE("records are deterministic per seed") {
  auto c = small_cycles(0.0, 3);
  c.reps = 50;
  const auto a = jsonl(run_cycle_experiments(c, CycleModel::null_model));
  const auto b = jsonl(run_cycle_experiments(c, CycleModel::null_model));
  CHECK(a == b);
  c.seed = 4;
  CHECK(jsonl(run_cycle_experiments(c, CycleModel::null_model)) != a);
}

TEST_CASE("no silent drops and complete metadata") {
  auto c = small_cycles(1.0, 5);
  c.reps = 37;
  const auto r = run_cycle_experiments(c, CycleModel::planted);
  CHECK(r.replicas.size() == 37);
  CHECK(r.metadata["seed"] == 5);
  for (const char* m : {"model-core", "graph-gen", "planted", "theory-closed-forms", "moments-exact", "variational", "stats",
                        "experiments-cli"})
    CHECK(r.metadata["modules"].contains(m));
  CHECK(r.config["n"] == 300);
  CHECK(r.config["experiment"] == "cycles-planted");
  const auto lines = parse_lines(jsonl(r));
  CHECK(lines.size() == 37 + 2);
  CHECK(lines.front()["metadata"]["seed"] == 5);
  CHECK(lines.front()["config"]["reps"] == 37);
}

TEST_CASE("failed replicas are recorded with their cause") {
  ExperimentConfig c;
  c.n = 20;
  c.d = 10;
  c.beta = 0;
  c.reps = 3;
  c.lmax = 3;
  const auto r = run_cycle_experiments(c, CycleModel::planted);
  CHECK(r.replicas.size() == 3);
  CHECK(r.failures() == 3);
  for (const auto& j : r.replicas) {
    CHECK(j["ok"] == false);
    CHECK(j["error"].get<std::string>().find("attempts") != std::string::npos);
  }
  CHECK_FALSE(r.passed());
}

TEST_CASE("CLT experiment at beta = 0 is degenerate") {
  ExperimentConfig c;
  c.n = 10;
  c.d = 3;
  c.beta = 0;
  c.reps = 30;
  const auto r = run_clt_experiment(c);
  CHECK(r.replicas.size() == 30);
  for (const auto& j : r.replicas) {
    CHECK(std::abs(j["centered_log_z"].get<double>()) <= 1e-12);
    CHECK(j["log_w"].get<double>() == 0.0);
  }
  // Both laws collapse to a point mass at 0, so only the moment gate is informative here.
  CHECK(std::abs(r.summary["mean_exp_centered"].get<double>() - 1) <= 1e-12);
  CHECK(r.summary["se_exp_centered"].get<double>() <= 1e-12);
  CHECK(r.gates.size() == 2);
  CHECK(r.gates[1].pass);
  c.n = 40;
  CHECK_THROWS_AS(run_clt_experiment(c), capacity_error);
}

TEST_CASE("planted cycles at beta = 0 match the null model") {
  const auto a = run_cycle_experiments(small_cycles(0.0, 8), CycleModel::null_model);
  const auto b = run_cycle_experiments(small_cycles(0.0, 8), CycleModel::planted);
  const double ma = a.summary["mean"]["c3"], mb = b.summary["mean"]["c3"];
  const double se = std::sqrt(2 * (4.0 / 3) / 400);
  CHECK(std::abs(ma - mb) < 2 * se);
  CHECK(a.passed());
  CHECK(b.passed());
  CHECK(a.summary.contains("corr_c3_c4"));
}

TEST_CASE("overlap diagnostic") {
  ExperimentConfig c;
  c.n = 64;
  c.d = 3;
  c.beta = 0;
  c.reps = 20;
  c.burnin = 10;
  c.mcmc_steps = 100;
  const auto r = run_overlap_diagnostic(c);
  CHECK(r.replicas.size() == 60);
  // At beta = 0 every sweep resamples all spins, so both overlaps match two independent uniform configurations.
  for (const auto& t : r.summary["trend"]) {
    const double ref = t["independent_reference"];
    CHECK(std::abs(t["mean_abs_overlap"].get<double>() / ref - 1) < 0.1);
    CHECK(std::abs(t["same_chain_abs_overlap"].get<double>() / ref - 1) < 0.1);
  }
  CHECK(r.passed());
  c.beta = 1;
  c.reps = 5;
  const auto hot = run_overlap_diagnostic(c);
  for (const auto& t : hot.summary["trend"])
    CHECK(t["same_chain_abs_overlap"].get<double>() > 2 * t["mean_abs_overlap"].get<double>());
}

TEST_CASE("variational report rows") {
  const auto r = run_variational_report(ExperimentConfig{});
  CHECK(r.passed());
  CHECK(r.gates.size() == 9);
  int scans = 0;
  for (const auto& j : r.replicas)
    if (j.value("kind", "") == "f_alpha_scan") {
      ++scans;
      for (const char* k : {"d", "beta", "alpha", "value", "d1", "d2"}) CHECK(j.contains(k));
    }
  CHECK(scans == 9 * 19);
}

TEST_CASE("moment experiment at one (n, d)") {
  ExperimentConfig c;
  c.n = 4;
  c.d = 3;
  c.beta = 1;
  const auto r = run_moment_experiments(c);
  CHECK(r.passed());
  c.n = 9;
  CHECK_THROWS(run_moment_experiments(c));
}

TEST_CASE("CSV output") {
  auto c = small_cycles(0.0, 9);
  c.reps = 5;
  const auto r = run_cycle_experiments(c, CycleModel::null_model);
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  int comments = 0, rows = 0;
  std::string header;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) {
      ++comments;
    } else if (header.empty()) {
      header = line;
    } else {
      ++rows;
    }
  }
  CHECK(comments >= 3);
  CHECK(rows == 5);
  CHECK(header.find("c3") != std::string::npos);
  CHECK(os.str().find("seed") != std::string::npos);
}

TEST_CASE("command line runner") {
  const auto out = temp_file("rrg_cli_test.jsonl");
  CHECK(run_cli("nishimori --out " + out.string()) == 0);
  {
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto lines = parse_lines(ss.str());
    REQUIRE(lines.size() >= 3);
    CHECK(lines.front()["metadata"].contains("modules"));
  }
  const auto cfg = temp_file("rrg_cli_test.cfg");
  {
    std::ofstream f(cfg);
    f << "n = 300\nreps = 40\nlmax = 3\nseed = 2\n";
  }
  CHECK(run_cli("cycles-null --config " + cfg.string() + " --reps 20 --format csv --out " + out.string()) == 0);
  {
    std::ifstream f(out);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(s.find("\"reps\":20") != std::string::npos);
  }
  CHECK(run_cli("cycles-null --reps 5 --format xml") != 0);
  CHECK(run_cli("moments --n 9 --d 3") == 2);
  CHECK(run_cli("bogus") != 0);
  std::filesystem::remove(out);
  std::filesystem::remove(cfg);
}
