#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rrg/params.hpp"
#include "rrg/rng.hpp"

namespace rrg {

// Fixed-point-free involution on d*n half-edges; half-edge i sits at vertex i / d.
struct Pairing {
  int n = 0;
  int d = 0;
  std::vector<int> mate;

  int vertex(int i) const { return i / d; }
  bool valid() const;
};

struct MultiGraph {
  int n = 0;
  int d = 0;
  std::vector<std::pair<int, int>> edges;  // u <= v; loops as (v, v)
  // CSR over non-loop edge endpoints, with multiplicity.
  std::vector<int> adj_off;
  std::vector<int> adj;
  std::vector<int> loops;  // loop count per vertex
  bool simple = true;

  static MultiGraph from_edges(int n, int d, std::vector<std::pair<int, int>> edges);

  const int* nbr_begin(int v) const { return adj.data() + adj_off[v]; }
  const int* nbr_end(int v) const { return adj.data() + adj_off[v + 1]; }
  int degree(int v) const { return adj_off[v + 1] - adj_off[v] + 2 * loops[v]; }
  int loop_count() const;
};

struct CycleCensus {
  int lmax = 0;
  std::vector<long long> c;  // c[i] for 1 <= i <= lmax; c[0] unused

  long long operator[](int i) const { return c.at(i); }
};

Pairing sample_pairing(const ModelParams& p, Rng& rng);
MultiGraph merge(const Pairing& pg);
bool is_simple(const Pairing& pg);

struct SimpleSample {
  MultiGraph graph;
  int attempts = 0;
};

// Rejection sampling of the pairing model until a simple graph appears.
SimpleSample sample_simple_regular(const ModelParams& p, Rng& rng, int max_tries = 200);

constexpr int kPairingEnumCap = 16;

// Visits every pairing of d*n half-edges once, in lexicographic order of the
// partner chosen for the smallest unmatched half-edge. Returns (dn-1)!!.
std::uint64_t enumerate_pairings(const ModelParams& p, const std::function<void(const Pairing&)>& visit,
                                 int cap = kPairingEnumCap);

constexpr int kCycleLmaxCap = 12;

CycleCensus count_cycles(const MultiGraph& g, int lmax);

void write_edge_list(std::ostream& os, const MultiGraph& g);
MultiGraph read_edge_list(std::istream& is);

// Small fixed graphs used in tests and examples.
MultiGraph complete_graph(int n);
MultiGraph petersen_graph();

}  // namespace rrg
