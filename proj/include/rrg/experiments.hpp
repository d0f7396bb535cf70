#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrg/params.hpp"
#include "rrg/planted.hpp"
#include "rrg/theory.hpp"

namespace rrg {

// Zero / negative numeric fields mean "use the experiment's default".
struct ExperimentConfig {
  std::string name;
  int n = 0;
  int d = 0;
  double beta = -1;
  int reps = 0;
  std::uint64_t seed = 1;
  int lmax = 0;
  int imax = 0;
  std::uint64_t mcmc_steps = 0;
  std::uint64_t burnin = 0;
  std::string out;
  std::string format = "jsonl";
  std::string planted_method = "counts";  // counts | mcmc | exact

  nlohmann::json to_json() const;
  // key = value lines; '#' starts a comment.
  static ExperimentConfig from_file(const std::string& path);
  void apply(const std::map<std::string, std::string>& kv);
};

struct Gate {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentRecord {
  nlohmann::json config;
  nlohmann::json metadata;  // seed, version hashes
  std::vector<nlohmann::json> replicas;  // one per replica, failures included
  nlohmann::json summary = nlohmann::json::object();
  std::vector<Gate> gates;

  bool passed() const;
  std::size_t failures() const;
  void add_gate(const std::string& name, bool pass, const std::string& detail = "");
  void write_jsonl(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
};

// Stream identifiers for Rng::stream(seed, id, replica).
enum ExperimentId : std::uint64_t {
  kExpClt = 1,
  kExpCltW = 2,
  kExpCyclesNull = 3,
  kExpCyclesPlanted = 4,
  kExpOverlap = 5,
  kExpSimplicity = 6,
  kExpWMoments = 7,
};

const std::map<std::string, std::string>& module_versions();

ExperimentRecord run_clt_experiment(const ExperimentConfig& cfg);

enum class CycleModel { null_model, planted };
ExperimentRecord run_cycle_experiments(const ExperimentConfig& cfg, CycleModel model);

// With cfg.n set: oracle at that (n, d) plus asymptotic gaps. Otherwise the
// full brute-force suite and both ladders.
ExperimentRecord run_moment_experiments(const ExperimentConfig& cfg);

struct LadderPoint {
  int n = 0;
  double log_exact = 0;
  double log_asymptotic = 0;
  double gap() const { return log_exact - log_asymptotic; }
};
std::vector<LadderPoint> first_moment_ladder(int d, double beta, const std::vector<int>& ns);
std::vector<LadderPoint> second_moment_ladder(int d, double beta, const std::vector<int>& ns);
// |gap| strictly decreasing along the ladder.
bool strictly_decreasing_gap(const std::vector<LadderPoint>& l);

// (n, d) pairs covered by the brute-force suite.
std::vector<std::pair<int, int>> bruteforce_suite();

ExperimentRecord run_overlap_diagnostic(const ExperimentConfig& cfg);
ExperimentRecord run_variational_report(const ExperimentConfig& cfg);
ExperimentRecord run_nishimori(const ExperimentConfig& cfg);
ExperimentRecord run_laplace_check(const ExperimentConfig& cfg);

// Fraction of simple draws among trials; planted2 uses the two-spin chain.
struct SimplicityRate {
  std::uint64_t trials = 0, simple = 0;
  double rate() const { return trials ? static_cast<double>(simple) / static_cast<double>(trials) : 0.0; }
};
SimplicityRate simplicity_rate(const ModelParams& p, SimplicityVariant v, std::uint64_t trials, std::uint64_t seed,
                               std::uint64_t burnin = 0);

// Raw and second moment of truncated W samples.
struct WMoments {
  double mean = 0, second = 0, se_mean = 0, se_second = 0;
  std::size_t count = 0;
};
WMoments w_moments(const ModelParams& p, int imax, std::size_t samples, std::uint64_t seed);

}  // namespace rrg
