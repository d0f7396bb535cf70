#include "rrg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "rrg/errors.hpp"
#include "rrg/graph.hpp"
#include "rrg/laplace.hpp"
#include "rrg/model.hpp"
#include "rrg/moments.hpp"
#include "rrg/stats.hpp"
#include "rrg/variational.hpp"

#ifndef RRG_VERSION
#define RRG_VERSION "0.0.0"
#endif
#ifndef RRG_HASH_MODEL_CORE
#define RRG_HASH_MODEL_CORE "unknown"
#define RRG_HASH_GRAPH_GEN "unknown"
#define RRG_HASH_PLANTED "unknown"
#define RRG_HASH_THEORY "unknown"
#define RRG_HASH_MOMENTS "unknown"
#define RRG_HASH_VARIATIONAL "unknown"
#define RRG_HASH_STATS "unknown"
#define RRG_HASH_EXPERIMENTS "unknown"
#endif

namespace rrg {

using nlohmann::json;

// ------------------------------------------------------------------- config

json ExperimentConfig::to_json() const {
  return {{"experiment", name}, {"n", n},       {"d", d},
          {"beta", beta},       {"reps", reps}, {"seed", seed},
          {"lmax", lmax},       {"imax", imax}, {"mcmc_steps", mcmc_steps},
          {"burnin", burnin},   {"out", out},   {"format", format},
          {"planted_method", planted_method}};
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& kv) {
  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"experiment", [&](const std::string& v) { name = v; }},
      {"n", [&](const std::string& v) { n = std::stoi(v); }},
      {"d", [&](const std::string& v) { d = std::stoi(v); }},
      {"beta", [&](const std::string& v) { beta = std::stod(v); }},
      {"reps", [&](const std::string& v) { reps = std::stoi(v); }},
      {"seed", [&](const std::string& v) { seed = std::stoull(v); }},
      {"lmax", [&](const std::string& v) { lmax = std::stoi(v); }},
      {"imax", [&](const std::string& v) { imax = std::stoi(v); }},
      {"mcmc_steps", [&](const std::string& v) { mcmc_steps = std::stoull(v); }},
      {"burnin", [&](const std::string& v) { burnin = std::stoull(v); }},
      {"out", [&](const std::string& v) { out = v; }},
      {"format", [&](const std::string& v) { format = v; }},
      {"planted_method", [&](const std::string& v) { planted_method = v; }},
  };
  for (const auto& [k, v] : kv) {
    std::string key = k;
    std::replace(key.begin(), key.end(), '-', '_');
    auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + k + "'");
    try {
      it->second(v);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad value for config key '" + k + "': " + v);
    }
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  ExperimentConfig c;
  c.apply(kv);
  return c;
}

// ------------------------------------------------------------------- record

bool ExperimentRecord::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

std::size_t ExperimentRecord::failures() const {
  return static_cast<std::size_t>(std::count_if(replicas.begin(), replicas.end(), [](const json& r) {
    return r.contains("ok") && !r["ok"].get<bool>();
  }));
}

void ExperimentRecord::add_gate(const std::string& name, bool pass, const std::string& detail) {
  gates.push_back({name, pass, detail});
}

namespace {

json gates_json(const std::vector<Gate>& gates) {
  json a = json::array();
  for (const auto& g : gates) a.push_back({{"gate", g.name}, {"pass", g.pass}, {"detail", g.detail}});
  return a;
}

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

}  // namespace

void ExperimentRecord::write_jsonl(std::ostream& os) const {
  os << json{{"type", "metadata"}, {"config", config}, {"metadata", metadata}}.dump() << '\n';
  for (const auto& r : replicas) os << json{{"type", "replica"}, {"record", r}}.dump() << '\n';
  os << json{{"type", "summary"}, {"summary", summary}, {"gates", gates_json(gates)}, {"passed", passed()}}.dump()
     << '\n';
}

void ExperimentRecord::write_csv(std::ostream& os) const {
  os << "# config " << config.dump() << '\n';
  os << "# metadata " << metadata.dump() << '\n';
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& r : replicas)
    for (const auto& [k, v] : r.items())
      if (seen.insert(k).second) cols.push_back(k);
  for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  if (!cols.empty()) os << '\n';
  for (const auto& r : replicas) {
    for (size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ',';
      if (r.contains(cols[i])) os << csv_cell(r[cols[i]]);
    }
    os << '\n';
  }
  os << "# summary " << summary.dump() << '\n';
  for (const auto& g : gates) os << "# gate," << g.name << ',' << (g.pass ? "PASS" : "FAIL") << ',' << csv_cell(g.detail) << '\n';
}

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"version", RRG_VERSION},
      {"model-core", RRG_HASH_MODEL_CORE},
      {"graph-gen", RRG_HASH_GRAPH_GEN},
      {"planted", RRG_HASH_PLANTED},
      {"theory-closed-forms", RRG_HASH_THEORY},
      {"moments-exact", RRG_HASH_MOMENTS},
      {"variational", RRG_HASH_VARIATIONAL},
      {"stats", RRG_HASH_STATS},
      {"experiments-cli", RRG_HASH_EXPERIMENTS},
  };
  return v;
}

namespace {

template <class T>
T or_default(T v, T def) {
  return v > T(0) ? v : def;
}

ExperimentRecord start(const ExperimentConfig& cfg, const std::string& name) {
  ExperimentRecord r;
  ExperimentConfig c = cfg;
  if (c.name.empty()) c.name = name;
  r.config = c.to_json();
  r.metadata = {{"seed", cfg.seed}, {"modules", module_versions()}};
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double mat_rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

// ---------------------------------------------------------------------- CLT

ExperimentRecord run_clt_experiment(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "clt");
  const ModelParams p(or_default(cfg.n, 24), or_default(cfg.d, 3), cfg.beta >= 0 ? cfg.beta : 0.5);
  const int reps = or_default(cfg.reps, 300);
  const int imax = or_default(cfg.imax, 25);
  const int lmax = or_default(cfg.lmax, 6);
  if (p.n > kExactZCap) throw capacity_error("clt: n exceeds the exact-Z cap");
  const double c = centering(p, p.n);
  const auto law = cycle_law_params(p, std::max(imax, 3));
  std::vector<double> centered, wdraws, expc;
  for (int i = 0; i < reps; ++i) {
    json r = {{"replica", i}};
    try {
      Rng rng = Rng::stream(cfg.seed, kExpClt, static_cast<std::uint64_t>(i));
      auto s = sample_simple_regular(p, rng);
      const double lz = log_partition_function(s.graph, p.beta);
      const auto cyc = count_cycles(s.graph, lmax);
      r["ok"] = true;
      r["log_z"] = lz;
      r["centered_log_z"] = lz - c;
      r["attempts"] = s.attempts;
      r["cycles"] = std::vector<long long>(cyc.c.begin() + 1, cyc.c.end());
      centered.push_back(lz - c);
      expc.push_back(std::exp(lz - c));
    } catch (const std::exception& e) {
      r["ok"] = false;
      r["error"] = e.what();
    }
    Rng wr = Rng::stream(cfg.seed, kExpCltW, static_cast<std::uint64_t>(i));
    const double lw = sample_log_w(law, wr).log_w;
    r["log_w"] = lw;
    wdraws.push_back(lw);
    rec.replicas.push_back(r);
  }
  if (centered.empty()) {
    rec.add_gate("clt_replicas", false, "no successful replica");
    return rec;
  }
  const auto ks = ks_distance(centered, wdraws);
  const auto se = summarize(expc);
  rec.summary = {{"ks", ks.statistic}, {"mean_exp_centered", se.mean}, {"se_exp_centered", se.se},
                 {"mean_centered", summarize(centered).mean}, {"mean_log_w", summarize(wdraws).mean},
                 {"failures", rec.failures()}};
  rec.add_gate("clt_ks_below_0.15", ks.statistic < 0.15, "KS = " + fmt(ks.statistic));
  rec.add_gate("clt_mean_exp_within_0.1", std::abs(se.mean - 1) <= 0.1, "mean = " + fmt(se.mean));
  return rec;
}

// ------------------------------------------------------------------- cycles

ExperimentRecord run_cycle_experiments(const ExperimentConfig& cfg, CycleModel model) {
  const bool planted = model == CycleModel::planted;
  ExperimentRecord rec = start(cfg, planted ? "cycles-planted" : "cycles-null");
  const ModelParams p(or_default(cfg.n, 1000), or_default(cfg.d, 3), cfg.beta >= 0 ? cfg.beta : (planted ? 1.0 : 0.0));
  const int reps = or_default(cfg.reps, 2000);
  const int lmax = or_default(cfg.lmax, 5);
  if (lmax < 3) throw domain_error("cycles: lmax must be >= 3");
  PlantedMethod method = PlantedMethod::counts;
  if (cfg.planted_method == "mcmc") method = PlantedMethod::mcmc;
  else if (cfg.planted_method == "exact") method = PlantedMethod::exact;
  else if (cfg.planted_method != "counts") throw std::invalid_argument("unknown planted method " + cfg.planted_method);
  const auto law = cycle_law_params(p, lmax);

  std::vector<std::vector<long long>> counts(lmax + 1);
  for (int i = 0; i < reps; ++i) {
    json r = {{"replica", i}};
    try {
      Rng rng = Rng::stream(cfg.seed, planted ? kExpCyclesPlanted : kExpCyclesNull, static_cast<std::uint64_t>(i));
      MultiGraph g;
      int attempts = 0;
      if (planted) {
        auto s = sample_planted_simple(p, rng, method, 200, cfg.mcmc_steps, cfg.burnin);
        g = std::move(s.graph);
        attempts = s.attempts;
      } else {
        auto s = sample_simple_regular(p, rng);
        g = std::move(s.graph);
        attempts = s.attempts;
      }
      const auto cyc = count_cycles(g, lmax);
      r["ok"] = true;
      r["attempts"] = attempts;
      for (int l = 1; l <= lmax; ++l) {
        r["c" + std::to_string(l)] = cyc[l];
        counts[l].push_back(cyc[l]);
      }
    } catch (const std::exception& e) {
      r["ok"] = false;
      r["error"] = e.what();
    }
    rec.replicas.push_back(r);
  }
  if (counts[3].empty()) {
    rec.add_gate("cycles_replicas", false, "no successful replica");
    return rec;
  }
  json z = json::object(), target = json::object(), mean = json::object();
  for (int l = 3; l <= lmax; ++l) {
    const double lam = law.lambda[l] * (planted ? 1 + law.delta[l] : 1.0);
    const double zl = poisson_mean_test(counts[l], lam);
    z["c" + std::to_string(l)] = zl;
    target["c" + std::to_string(l)] = lam;
    std::vector<double> v(counts[l].begin(), counts[l].end());
    mean["c" + std::to_string(l)] = summarize(v).mean;
  }
  std::vector<double> c3(counts[3].begin(), counts[3].end());
  double corr34 = 0;
  if (lmax >= 4) {
    std::vector<double> c4(counts[4].begin(), counts[4].end());
    corr34 = correlation(c3, c4);
  }
  rec.summary = {{"z", z}, {"lambda", target}, {"mean", mean}, {"corr_c3_c4", corr34}, {"failures", rec.failures()}};
  const double zmax = planted ? 4.0 : 3.0;
  const double z3 = z["c3"].get<double>();
  rec.add_gate("c3_mean_z", std::abs(z3) < zmax, "z = " + fmt(z3) + " vs " + fmt(target["c3"].get<double>()));
  if (!planted && lmax >= 4) {
    const double z4 = z["c4"].get<double>();
    rec.add_gate("c4_mean_z", std::abs(z4) < zmax, "z = " + fmt(z4) + " vs " + fmt(target["c4"].get<double>()));
  }
  rec.add_gate("no_failed_replicas", rec.failures() == 0, std::to_string(rec.failures()) + " failed");
  return rec;
}

// ------------------------------------------------------------------ moments

std::vector<LadderPoint> first_moment_ladder(int d, double beta, const std::vector<int>& ns) {
  std::vector<LadderPoint> out;
  for (int n : ns) {
    const ModelParams p(n, d, beta);
    out.push_back({n, first_moment_exact(p).log_evaluate(p.x), first_moment_asymptotic(p).pairing_total(n)});
  }
  return out;
}

std::vector<LadderPoint> second_moment_ladder(int d, double beta, const std::vector<int>& ns) {
  std::vector<LadderPoint> out;
  for (int n : ns) {
    const ModelParams p(n, d, beta);
    out.push_back({n, second_moment_exact(p).log_evaluate(p.x), second_moment_asymptotic(p).pairing_total(n)});
  }
  return out;
}

bool strictly_decreasing_gap(const std::vector<LadderPoint>& l) {
  for (size_t i = 1; i < l.size(); ++i)
    if (!(std::abs(l[i].gap()) < std::abs(l[i - 1].gap()))) return false;
  return true;
}

std::vector<std::pair<int, int>> bruteforce_suite() {
  std::vector<std::pair<int, int>> s;
  for (int d = 1; d <= kPairingEnumCap; ++d)
    for (int n = 1; n * d <= kPairingEnumCap; ++n)
      if ((n * d) % 2 == 0) s.emplace_back(n, d);
  return s;
}

namespace {

json ladder_json(const std::vector<LadderPoint>& l) {
  json a = json::array();
  for (const auto& pt : l)
    a.push_back({{"n", pt.n}, {"log_exact", pt.log_exact}, {"log_asymptotic", pt.log_asymptotic}, {"gap", pt.gap()}});
  return a;
}

std::string ladder_detail(const std::vector<LadderPoint>& l) {
  std::string s;
  for (const auto& pt : l) s += (s.empty() ? "" : ", ") + ("n=" + std::to_string(pt.n) + " gap=" + fmt(pt.gap()));
  return s;
}

json oracle_row(int n, int d, bool& ok) {
  const ModelParams p(n, d, 0.0);
  const auto bf = pairing_moments_bruteforce(p);
  const bool e1 = first_moment_exact(p) == bf.first;
  const bool e2 = second_moment_exact(p) == bf.second;
  ok = e1 && e2;
  return {{"kind", "oracle"}, {"n", n}, {"d", d}, {"pairings", bf.pairings}, {"first_equal", e1}, {"second_equal", e2}};
}

}  // namespace

ExperimentRecord run_moment_experiments(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "moments");
  const int d = or_default(cfg.d, 3);
  const double beta = cfg.beta >= 0 ? cfg.beta : 1.0;
  if (cfg.n > 0) {
    const ModelParams p(cfg.n, d, beta);
    json row;
    if (p.half_edges() <= kPairingEnumCap) {
      bool ok = false;
      row = oracle_row(p.n, p.d, ok);
      rec.add_gate("exact_equals_bruteforce", ok, "n=" + std::to_string(p.n) + " d=" + std::to_string(p.d));
    } else {
      row = {{"kind", "exact"}, {"n", p.n}, {"d", p.d}};
    }
    const auto m1 = first_moment_exact(p);
    row["log_first_exact"] = m1.log_evaluate(p.x);
    row["first_exact"] = m1.to_string();
    if (p.d >= 3) row["log_first_asymptotic"] = first_moment_asymptotic(p).pairing_total(p.n);
    if (p.n <= kSecondMomentCap) {
      const auto m2 = second_moment_exact(p);
      row["second_exact"] = m2.to_string();
      row["log_second_exact"] = m2.log_evaluate(p.x);
      if (p.d >= 3) {
        try {
          row["log_second_asymptotic"] = second_moment_asymptotic(p).pairing_total(p.n);
        } catch (const domain_error& e) {
          row["second_asymptotic_error"] = e.what();
        }
      }
    }
    rec.replicas.push_back(row);
    return rec;
  }

  bool all_ok = true;
  std::string bad;
  for (auto [n, dd] : bruteforce_suite()) {
    bool ok = false;
    rec.replicas.push_back(oracle_row(n, dd, ok));
    if (!ok) {
      all_ok = false;
      bad += " (" + std::to_string(n) + "," + std::to_string(dd) + ")";
    }
  }
  rec.add_gate("exact_equals_bruteforce_suite", all_ok, all_ok ? "all dn <= 16" : "mismatch at" + bad);

  const auto l1 = first_moment_ladder(d, beta, {40, 80, 160});
  const auto l2 = second_moment_ladder(d, beta, {8, 12, 16});
  for (const auto& pt : l1) rec.replicas.push_back({{"kind", "first_ladder"}, {"n", pt.n}, {"gap", pt.gap()}});
  for (const auto& pt : l2) rec.replicas.push_back({{"kind", "second_ladder"}, {"n", pt.n}, {"gap", pt.gap()}});
  rec.summary = {{"first_ladder", ladder_json(l1)}, {"second_ladder", ladder_json(l2)}};
  rec.add_gate("first_ladder_decreasing", strictly_decreasing_gap(l1), ladder_detail(l1));
  rec.add_gate("first_ladder_final_0.02", std::abs(l1.back().gap()) <= 0.02, ladder_detail(l1));
  rec.add_gate("second_ladder_decreasing", strictly_decreasing_gap(l2), ladder_detail(l2));
  rec.add_gate("second_ladder_final_0.25", std::abs(l2.back().gap()) <= 0.25, ladder_detail(l2));
  return rec;
}

// ------------------------------------------------------------------ overlap

ExperimentRecord run_overlap_diagnostic(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "overlap");
  const int d = or_default(cfg.d, 3);
  const double beta = cfg.beta >= 0 ? cfg.beta : 1.0;
  const int reps = or_default(cfg.reps, 20);
  const std::uint64_t burnin = or_default<std::uint64_t>(cfg.burnin, 200);
  const std::uint64_t samples = or_default<std::uint64_t>(cfg.mcmc_steps, 200);
  const int thin = 5;
  std::vector<int> ns = {256, 512, 1024};
  if (cfg.n > 0) ns = {cfg.n, 2 * cfg.n, 4 * cfg.n};

  json trend = json::array();
  std::vector<double> means;
  std::uint64_t replica = 0;
  for (int n : ns) {
    const ModelParams p(n, d, beta);
    std::vector<double> per_graph, same;
    for (int g = 0; g < reps; ++g, ++replica) {
      json r = {{"replica", replica}, {"n", n}, {"graph", g}};
      try {
        Rng rng = Rng::stream(cfg.seed, kExpOverlap, replica);
        auto s = sample_simple_regular(p, rng);
        SpinConfig a = uniform_spins(n, rng), b = uniform_spins(n, rng);
        for (std::uint64_t t = 0; t < burnin; ++t) {
          gibbs_sweep(s.graph, a, p, rng);
          gibbs_sweep(s.graph, b, p, rng);
        }
        double acc = 0, acc_same = 0;
        for (std::uint64_t k = 0; k < samples; ++k) {
          for (int t = 0; t < thin; ++t) {
            gibbs_sweep(s.graph, a, p, rng);
            gibbs_sweep(s.graph, b, p, rng);
          }
          acc += std::abs(static_cast<double>(overlap(a, b))) / n;
          // Same chain, one sweep apart.
          const SpinConfig prev = a;
          gibbs_sweep(s.graph, a, p, rng);
          acc_same += std::abs(static_cast<double>(overlap(prev, a))) / n;
        }
        const double m = acc / static_cast<double>(samples);
        r["ok"] = true;
        r["mean_abs_overlap"] = m;
        r["same_chain_abs_overlap"] = acc_same / static_cast<double>(samples);
        per_graph.push_back(m);
        same.push_back(acc_same / static_cast<double>(samples));
      } catch (const std::exception& e) {
        r["ok"] = false;
        r["error"] = e.what();
      }
      rec.replicas.push_back(r);
    }
    const double m = per_graph.empty() ? NAN : summarize(per_graph).mean;
    means.push_back(m);
    trend.push_back({{"n", n},
                     {"mean_abs_overlap", m},
                     {"same_chain_abs_overlap", same.empty() ? NAN : summarize(same).mean},
                     {"independent_reference", std::sqrt(2 / (std::numbers::pi * n))}});
  }
  rec.summary = {{"trend", trend}, {"failures", rec.failures()}};
  bool dec = true;
  std::string detail;
  for (size_t i = 0; i < means.size(); ++i) {
    if (i && !(means[i] < means[i - 1])) dec = false;
    detail += (i ? ", " : "") + ("n=" + std::to_string(ns[i]) + ": " + fmt(means[i]));
  }
  rec.add_gate("overlap_strictly_decreasing", dec, detail);
  return rec;
}

// -------------------------------------------------------------- variational

namespace {

struct GridChecks {
  json row;
  bool ok = true;
  std::vector<std::string> failed;
  void check(const std::string& name, double value, double tol) {
    row[name] = value;
    if (!(value <= tol)) {
      ok = false;
      failed.push_back(name + "=" + fmt(value));
    }
  }
};

GridChecks variational_point(int d, double frac) {
  const double beta = frac * beta_ks(d);
  const ModelParams p(2, d, beta);
  GridChecks g;
  g.row = {{"kind", "checks"}, {"d", d}, {"beta", beta}, {"beta_over_ks", frac}};

  // first moment
  const auto pc = psi_argmax_closed(p);
  const auto pf = find_psi_max(p);
  g.check("psi_argmax_err", std::max(std::abs(pf.mu_pp - pc.mu_pp), std::abs(pf.rho_p - pc.rho_p)), 1e-8);
  g.check("psi_max_err", std::abs(psi_eval(pf, p).value - psi_max_closed(p)), 1e-10);
  Vec x0(2);
  x0 << pc.mu_pp, pc.rho_p;
  auto pt2 = [](const Vec& v) { return FirstMomentPoint{v[0], v[1]}; };
  const Mat h_an = psi_eval(pc, p).hess;
  const Mat h_fd = fd_hessian([&](const Vec& v) { return psi_eval(pt2(v), p).value; }, x0);
  const Mat h_fdg = fd_jacobian([&](const Vec& v) -> Vec { return psi_eval(pt2(v), p).grad; }, x0, 1e-5);
  g.check("psi_hess_fd_rel", mat_rel_err(h_fd, h_an), 1e-4);
  g.check("psi_det_closed_rel", rel_err((-h_an).determinant(), psi_hessian_det_closed(p)), 1e-6);
  g.check("psi_det_fd_rel", rel_err((-h_fdg).determinant(), psi_hessian_det_closed(p)), 1e-6);

  // second moment
  const auto dc = delta_argmax_closed(p);
  const auto df = find_delta_max(p);
  double aerr = 0;
  for (int i = 0; i < 9; ++i) aerr = std::max(aerr, std::abs(df.x[i] - dc.x[i]));
  g.check("delta_argmax_err", aerr, 1e-8);
  g.check("delta_max_err", std::abs(delta_eval(df, p).value - delta_max_closed(p)), 1e-10);
  auto pt9 = [](const Vec& v) { return SecondMomentPoint::from_vec(v); };
  const Vec y0 = dc.vec();
  const Mat d_an = delta_hessian_analytic(dc, p);
  const Mat d_fd = fd_hessian([&](const Vec& v) { return delta_eval(pt9(v), p).value; }, y0);
  g.check("delta_hess_fd_rel", mat_rel_err(d_fd, d_an), 1e-4);
  const Mat d_fdg = fd_jacobian([&](const Vec& v) -> Vec { return delta_eval(pt9(v), p).grad; }, y0, 1e-5);
  g.check("delta_det_fd_rel", rel_err((-d_fdg).determinant(), delta_hessian_det_closed(p)), 1e-4);
  const auto hd = hessian_delta(p);
  g.check("delta_det_assembly_rel", rel_err(hd.det_neg, delta_hessian_det_closed(p)), 1e-9);
  g.check("delta_assembly_vs_analytic_rel", mat_rel_err(hd.matrix, d_an), 1e-10);

  // overlap parametrization
  double inner_res = 0, f_vs_delta = 0, d1_err = 0, d2_err = 0;
  for (double a : {-0.6, -0.2, 0.0, 0.25, 0.7}) {
    const auto s = solve_inner_mu(make_overlap(a, beta), p);
    inner_res = std::max({inner_res, std::abs(s.residual_pp), std::abs(s.residual_pm)});
    const auto f = f_alpha_eval(a, p);
    f_vs_delta = std::max(f_vs_delta, std::abs(f.value - delta_eval(s.point, p).value));
    const double h = 1e-5;
    const double fd1 = (f_alpha_eval(a + h, p).value - f_alpha_eval(a - h, p).value) / (2 * h);
    const double fd2 = (f_alpha_eval(a + h, p).d1 - f_alpha_eval(a - h, p).d1) / (2 * h);
    d1_err = std::max(d1_err, std::abs(fd1 - f.d1));
    d2_err = std::max(d2_err, std::abs(fd2 - f.d2));
  }
  g.check("inner_residual", inner_res, 1e-12);
  g.check("f_alpha_vs_delta", f_vs_delta, 1e-10);
  g.check("f_alpha_d1_fd", d1_err, 1e-7);
  g.check("f_alpha_d2_fd", d2_err, 1e-6);
  g.check("f_zero_vs_delta_max", std::abs(f_alpha_eval(0, p).value - delta_max_closed(p)), 1e-12);
  g.check("alpha_argmax_abs", std::abs(find_alpha_max(p)), 1e-8);

  // Laplace application to the first moment
  const ModelParams pl(100, d, beta);
  const auto lr = laplace_estimate(first_moment_laplace_problem(pl), pl.n);
  g.check("laplace_first_vs_asymptotic", std::abs(lr.log_value - first_moment_asymptotic(pl).pairing_total(pl.n)), 1e-10);
  g.row["pass"] = g.ok;
  return g;
}

}  // namespace

ExperimentRecord run_variational_report(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "variational");
  std::vector<int> ds = {3, 4, 5};
  if (cfg.d > 0) ds = {cfg.d};
  std::vector<double> fracs = {0.2, 0.5, 0.9};
  if (cfg.beta > 0) fracs = {cfg.beta / beta_ks(ds.front())};
  for (int d : ds)
    for (double f : fracs) {
      std::string tag = "d=" + std::to_string(d) + " beta/beta_ks=" + fmt(f);
      try {
        auto g = variational_point(d, f);
        rec.replicas.push_back(g.row);
        const ModelParams p(2, d, f * beta_ks(d));
        for (int k = -9; k <= 9; ++k) {
          const double a = 0.1 * k;
          const auto fa = f_alpha_eval(a, p);
          rec.replicas.push_back({{"kind", "f_alpha_scan"}, {"d", d}, {"beta", p.beta}, {"alpha", a},
                                  {"value", fa.value}, {"d1", fa.d1}, {"d2", fa.d2}});
        }
        std::string why;
        for (const auto& s : g.failed) why += (why.empty() ? "" : "; ") + s;
        rec.add_gate(tag, g.ok, why);
      } catch (const std::exception& e) {
        rec.replicas.push_back({{"d", d}, {"beta_over_ks", f}, {"pass", false}, {"error", e.what()}});
        rec.add_gate(tag, false, e.what());
      }
    }
  return rec;
}

// ---------------------------------------------------------------- Nishimori

ExperimentRecord run_nishimori(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "nishimori");
  const ModelParams p(or_default(cfg.n, 4), or_default(cfg.d, 3), 0.0);
  for (const mpq_class& x : {mpq_class(1, 2), mpq_class(1, 3)}) {
    const mpq_class gap = nishimori_check(p, x);
    rec.replicas.push_back({{"x", x.get_str()}, {"discrepancy", gap.get_str()}});
    rec.add_gate("nishimori_x=" + x.get_str(), gap == 0, "discrepancy " + gap.get_str());
  }
  return rec;
}

// ------------------------------------------------------------------ Laplace

ExperimentRecord run_laplace_check(const ExperimentConfig& cfg) {
  ExperimentRecord rec = start(cfg, "laplace-check");

  // Gaussian sum: sum_k exp(-k^2 / (2n)) over the lattice Z / n.
  {
    const double n = 1e4;
    LaplaceProblem pr;
    pr.dim = 1;
    pr.basis = Mat::Identity(1, 1);
    pr.offset = Vec::Constant(1, 0.3);
    pr.phi = [](const Vec& v) { return -0.5 * v[0] * v[0]; };
    pr.weight = [](const Vec&) { return 1.0; };
    pr.b_n = [](double) { return 1.0; };
    pr.feasible = [](const Vec&) { return true; };
    const auto lr = laplace_estimate(pr, n);
    long double s = 0;
    for (long k = -200000; k <= 200000; ++k) s += std::exp(-0.5L * k * k / n);
    const double ratio = std::exp(static_cast<double>(std::log(s)) - lr.log_value);
    rec.replicas.push_back({{"check", "gaussian"}, {"n", n}, {"ratio", ratio}});
    rec.add_gate("gaussian_sum_ratio", std::abs(ratio - 1) <= 1e-6, "ratio = " + fmt(ratio));
  }

  // Binomial sum: sum_k C(n,k) p^k q^(n-k) over x = k/n, equal to 1.
  {
    const int n = 1000;
    const double pp = 0.3, qq = 0.7;
    LaplaceProblem pr;
    pr.dim = 1;
    pr.basis = Mat::Identity(1, 1);
    pr.offset = Vec::Constant(1, 0.5);
    auto H = [](double t) { return -t * std::log(t) - (1 - t) * std::log(1 - t); };
    pr.phi = [=](const Vec& v) { return H(v[0]) + v[0] * std::log(pp) + (1 - v[0]) * std::log(qq); };
    pr.phi_grad = [=](const Vec& v) -> Vec {
      return Vec::Constant(1, std::log((1 - v[0]) / v[0]) + std::log(pp / qq));
    };
    pr.phi_hess = [](const Vec& v) -> Mat { return Mat::Constant(1, 1, -1 / (v[0] * (1 - v[0]))); };
    pr.weight = [](const Vec& v) { return 1 / std::sqrt(2 * std::numbers::pi * v[0] * (1 - v[0])); };
    pr.b_n = [](double m) { return 1 / std::sqrt(m); };
    pr.feasible = [](const Vec& v) { return v[0] > 0 && v[0] < 1; };
    const auto lr = laplace_estimate(pr, n);
    // Exact sum via log-gamma terms.
    double m = -INFINITY;
    std::vector<double> lt(n + 1);
    for (int k = 0; k <= n; ++k) {
      lt[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(pp) +
              (n - k) * std::log(qq);
      m = std::max(m, lt[k]);
    }
    double s = 0;
    for (double t : lt) s += std::exp(t - m);
    const double ratio = std::exp(m + std::log(s) - lr.log_value);
    rec.replicas.push_back({{"check", "binomial"}, {"n", n}, {"ratio", ratio}});
    rec.add_gate("binomial_sum_ratio", std::abs(ratio - 1) <= 1e-3, "ratio = " + fmt(ratio));
  }

  // First-moment application.
  {
    const int d = or_default(cfg.d, 3);
    const double beta = cfg.beta >= 0 ? cfg.beta : 1.0;
    double worst = 0;
    for (int n : {40, 80, 160}) {
      const ModelParams p(n, d, beta);
      const auto lr = laplace_estimate(first_moment_laplace_problem(p), n);
      const double asym = first_moment_asymptotic(p).pairing_total(n);
      worst = std::max(worst, std::abs(lr.log_value - asym));
      rec.replicas.push_back({{"check", "first_moment"}, {"n", n}, {"log_laplace", lr.log_value}, {"log_asymptotic", asym}});
    }
    rec.add_gate("first_moment_application", worst <= 1e-10, "max |log diff| = " + fmt(worst));
  }
  return rec;
}

// --------------------------------------------------------------- simplicity

SimplicityRate simplicity_rate(const ModelParams& p, SimplicityVariant v, std::uint64_t trials, std::uint64_t seed,
                               std::uint64_t burnin) {
  SimplicityRate r;
  const std::uint64_t variant = static_cast<std::uint64_t>(v);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, kExpSimplicity * 16 + variant, t);
    bool ok = false;
    switch (v) {
      case SimplicityVariant::null_model: ok = is_simple(sample_pairing(p, rng)); break;
      case SimplicityVariant::planted1: {
        const SpinConfig s = uniform_spins(p.n, rng);
        ok = is_simple(sample_planted_counts(p, s, rng));
        break;
      }
      case SimplicityVariant::planted2: ok = planted_pair_trial_simple(p, rng, burnin); break;
    }
    ++r.trials;
    r.simple += ok;
  }
  return r;
}

WMoments w_moments(const ModelParams& p, int imax, std::size_t samples, std::uint64_t seed) {
  const auto law = cycle_law_params(p, imax);
  Rng rng = Rng::stream(seed, kExpWMoments, 0);
  std::vector<double> w(samples), w2(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    w[i] = std::exp(sample_log_w(law, rng).log_w);
    w2[i] = w[i] * w[i];
  }
  const auto s1 = summarize(w), s2 = summarize(w2);
  return {s1.mean, s2.mean, s1.se, s2.se, samples};
}

}  // namespace rrg
