#include "rrg/model.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "rrg/errors.hpp"

namespace rrg {

void check_spins(const SpinConfig& s) {
  for (auto v : s)
    if (v != 1 && v != -1) throw domain_error("spin entries must be +1 or -1");
}

SpinConfig uniform_spins(int n, Rng& rng) {
  SpinConfig s(n);
  for (int i = 0; i < n; i += 64) {
    std::uint64_t bits = rng();
    for (int k = 0; k < 64 && i + k < n; ++k) s[i + k] = ((bits >> k) & 1) ? 1 : -1;
  }
  return s;
}

long long hamiltonian(const MultiGraph& g, const SpinConfig& sigma) {
  if (static_cast<int>(sigma.size()) != g.n) throw dimension_error("spin config length differs from vertex count");
  long long h = 0;
  for (const auto& [u, v] : g.edges) h += (u == v) || sigma[u] == sigma[v];
  return h;
}

namespace {

void check_cap(const MultiGraph& g, int cap) {
  if (g.n > cap)
    throw capacity_error("exact enumeration limited to n <= " + std::to_string(cap) +
                         "; use Monte Carlo estimators for larger graphs");
  if (g.n > 62) throw capacity_error("n too large for 64-bit Gray code");
}

}  // namespace

std::vector<std::uint64_t> energy_histogram(const MultiGraph& g, int cap) {
  check_cap(g, cap);
  const int n = g.n;
  std::vector<std::uint64_t> hist(g.edges.size() + 1, 0);
  // Vertex n-1 is pinned to +1 and the count doubled (global flip symmetry).
  std::vector<std::int8_t> s(n, 1);
  long long h = static_cast<long long>(g.edges.size());
  ++hist[h];
  if (n >= 2) {
    const std::uint64_t steps = (1ULL << (n - 1));
    const int* off = g.adj_off.data();
    const int* adj = g.adj.data();
    for (std::uint64_t i = 1; i < steps; ++i) {
      const int v = std::countr_zero(i);
      const std::int8_t sv = s[v];
      int same = 0;
      for (int k = off[v]; k < off[v + 1]; ++k) same += s[adj[k]] == sv;
      const int deg = off[v + 1] - off[v];
      h += deg - 2 * same;
      s[v] = -sv;
      ++hist[h];
    }
  }
  for (auto& c : hist) c *= 2;
  return hist;
}

PolynomialInX partition_polynomial(const MultiGraph& g, int cap) {
  auto hist = energy_histogram(g, cap);
  PolynomialInX p;
  for (int k = 0; k < static_cast<int>(hist.size()); ++k)
    if (hist[k]) p.add_term(k, mpq_class(mpz_class(std::to_string(hist[k]))));
  return p;
}

double log_partition_function(const MultiGraph& g, double beta, int cap) {
  auto hist = energy_histogram(g, cap);
  // Terms decrease in k for beta >= 0 apart from the counts; use a stable sum.
  double m = -INFINITY;
  for (int k = 0; k < static_cast<int>(hist.size()); ++k)
    if (hist[k]) m = std::max(m, std::log(static_cast<double>(hist[k])) - beta * k);
  double s = 0;
  for (int k = 0; k < static_cast<int>(hist.size()); ++k)
    if (hist[k]) s += std::exp(std::log(static_cast<double>(hist[k])) - beta * k - m);
  return m + std::log(s);
}

double partition_function(const MultiGraph& g, double beta, int cap) {
  return std::exp(log_partition_function(g, beta, cap));
}

void gray_code_walk(const MultiGraph& g, const std::function<void(std::uint64_t, const SpinConfig&, long long)>& visit,
                    int cap) {
  check_cap(g, cap);
  const int n = g.n;
  SpinConfig s(n, 1);
  long long h = static_cast<long long>(g.edges.size());
  visit(0, s, h);
  const std::uint64_t steps = 1ULL << n;
  for (std::uint64_t i = 1; i < steps; ++i) {
    const int v = std::countr_zero(i);
    int same = 0;
    for (const int* p = g.nbr_begin(v); p != g.nbr_end(v); ++p) same += s[*p] == s[v];
    h += (g.nbr_end(v) - g.nbr_begin(v)) - 2 * same;
    s[v] = -s[v];
    visit(i, s, h);
  }
}

double boltzmann_logprob(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& p, std::optional<double> log_z) {
  long long h = hamiltonian(g, sigma);
  double lz = log_z ? *log_z : log_partition_function(g, p.beta);
  return -p.beta * static_cast<double>(h) - lz;
}

double heat_bath_plus_prob(const MultiGraph& g, const SpinConfig& sigma, int v, double beta) {
  int plus = 0, minus = 0;
  for (const int* q = g.nbr_begin(v); q != g.nbr_end(v); ++q) (sigma[*q] > 0 ? plus : minus)++;
  // Loops add the same weight to both choices.
  return 1.0 / (1.0 + std::exp(-beta * (minus - plus)));
}

void gibbs_sweep(const MultiGraph& g, SpinConfig& sigma, const ModelParams& p, Rng& rng) {
  if (static_cast<int>(sigma.size()) != g.n) throw dimension_error("spin config length differs from vertex count");
  // exp(-beta k) for neighbor-count differences k in [-D, D].
  int dmax = 0;
  for (int v = 0; v < g.n; ++v) dmax = std::max(dmax, g.adj_off[v + 1] - g.adj_off[v]);
  std::vector<double> table(2 * dmax + 1);
  for (int k = -dmax; k <= dmax; ++k) table[k + dmax] = 1.0 / (1.0 + std::exp(-p.beta * k));
  for (int v = 0; v < g.n; ++v) {
    int diff = 0;  // minus - plus
    for (const int* q = g.nbr_begin(v); q != g.nbr_end(v); ++q) diff -= sigma[*q];
    sigma[v] = rng.uniform() < table[diff + dmax] ? 1 : -1;
  }
}

long long overlap(const SpinConfig& sigma, const SpinConfig& tau) {
  if (sigma.size() != tau.size()) throw dimension_error("spin configs differ in length");
  long long s = 0;
  for (size_t i = 0; i < sigma.size(); ++i) s += sigma[i] * tau[i];
  return s;
}

}  // namespace rrg
