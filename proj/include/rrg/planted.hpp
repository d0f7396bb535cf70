#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "rrg/graph.hpp"
#include "rrg/model.hpp"
#include "rrg/params.hpp"
#include "rrg/rng.hpp"

namespace rrg {

// mu_pp = 2 #(++ edges)/dn, mu_mm likewise, mu_pm = #(mixed edges)/dn.
template <class T>
struct EdgeTypeStats2T {
  T mu_pp{}, mu_mm{}, mu_pm{}, rho_p{}, rho_m{};
};
using EdgeTypeStats2 = EdgeTypeStats2T<mpq_class>;
using EdgeTypeStats2Real = EdgeTypeStats2T<double>;

EdgeTypeStats2Real to_real(const EdgeTypeStats2& s);
bool check_invariants(const EdgeTypeStats2& s, int n, int d);

// Vertex type of a spin pair: ++ -> 0, +- -> 1, -+ -> 2, -- -> 3.
inline int pair_type(int s, int t) { return (s < 0) * 2 + (t < 0); }

// mu[a*4+b] over ordered vertex-type pairs (a = (s1,t1), b = (s2,t2)); rho[a].
struct EdgeTypeStats16 {
  std::array<mpq_class, 16> mu;
  std::array<mpq_class, 4> rho;
};
bool check_invariants(const EdgeTypeStats16& s);

struct PlantedSampleReport {
  MultiGraph graph;
  SpinConfig sigma;
  EdgeTypeStats2 mu_stats;
  double distance_to_muhat = 0;
  nlohmann::json to_json() const;
};

EdgeTypeStats2Real mu_hat(const ModelParams& p);
EdgeTypeStats2 edge_type_stats(const MultiGraph& g, const SpinConfig& sigma);
EdgeTypeStats16 edge_type_stats16(const MultiGraph& g, const SpinConfig& sigma, const SpinConfig& tau);
// Sup-norm distance of the three mu entries from mu_hat.
double distance_to_muhat(const EdgeTypeStats2& s, const ModelParams& p);
PlantedSampleReport planted_report(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& p);

// Exact sampler for d*n <= 16: every pairing weighted by x^H, grouped by H.
class ExactPlantedSampler {
 public:
  ExactPlantedSampler(const ModelParams& p, const SpinConfig& sigma);
  Pairing sample(Rng& rng) const;
  // Exact probability of a pairing (as a double) and index in enumeration order.
  double probability(const Pairing& pg) const;
  std::uint64_t pairing_count() const { return total_; }
  const SpinConfig& sigma() const { return sigma_; }

 private:
  ModelParams p_;
  SpinConfig sigma_;
  std::vector<std::vector<std::vector<std::int8_t>>> by_h_;  // by_h_[H] = list of mate arrays
  std::vector<double> cum_;
  double norm_ = 0;
  std::uint64_t total_ = 0;
};

Pairing sample_planted_exact(const ModelParams& p, const SpinConfig& sigma, Rng& rng);

// Exact sampler for any n: draw the type counts (m_pp, m_pm, m_mm) from their
// marginal law, then a uniform pairing with those counts.
Pairing sample_planted_counts(const ModelParams& p, const SpinConfig& sigma, Rng& rng);

// Double-edge-swap Metropolis chain targeting x^{sum_k H(sigma_k)} over pairings,
// for one or two spin configurations.
class SwapChain {
 public:
  SwapChain(const ModelParams& p, const std::vector<const SpinConfig*>& spins, const Pairing& start);
  void run(std::uint64_t proposals, Rng& rng);
  Pairing pairing() const;
  long long energy() const { return h_; }
  std::uint64_t accepted() const { return acc_; }
  std::uint64_t proposed() const { return prop_; }

 private:
  ModelParams p_;
  std::vector<std::uint8_t> code_;  // per half-edge type code
  std::array<std::array<int, 4>, 4> mono_{};
  std::array<double, 9> accept_{};  // x^k for k = 0..8
  std::vector<std::array<int, 2>> pairs_;
  long long h_ = 0;
  std::uint64_t acc_ = 0, prop_ = 0;
};

// Proposal count 20 dn ln(dn).
std::uint64_t default_burnin(const ModelParams& p);

Pairing sample_planted_mcmc(const ModelParams& p, const SpinConfig& sigma, Rng& rng, std::uint64_t steps,
                            std::uint64_t burnin);
Pairing sample_planted_pair_mcmc(const ModelParams& p, const SpinConfig& sigma, const SpinConfig& tau, Rng& rng,
                                 std::uint64_t steps, std::uint64_t burnin);

enum class PlantedMethod { exact, counts, mcmc };

struct PlantedSimpleSample {
  MultiGraph graph;
  SpinConfig sigma;
  int attempts = 0;
};

// sigma uniform, then planted pairings for that sigma until one is simple.
PlantedSimpleSample sample_planted_simple(const ModelParams& p, Rng& rng, PlantedMethod method = PlantedMethod::mcmc,
                                          int max_tries = 200, std::uint64_t steps = 0, std::uint64_t burnin = 0);

// One draw of the two-configuration planted pairing with sigma, tau uniform;
// returns whether the merged graph is simple.
bool planted_pair_trial_simple(const ModelParams& p, Rng& rng, std::uint64_t burnin = 0);

// Max |P[Ghat=G] mu_G(s) - P[Sigmahat=s] P[G*=G | s]| over pairings G and spins s,
// in exact arithmetic at the rational x. Requires d*n <= 12.
mpq_class nishimori_check(const ModelParams& p, const mpq_class& x);

// Packs a pairing with d*n <= 16 into 64 bits (4 bits per half-edge).
std::uint64_t pairing_key(const Pairing& pg);

}  // namespace rrg
