#include "rrg/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "rrg/errors.hpp"

namespace rrg {

bool Pairing::valid() const {
  if (static_cast<long long>(mate.size()) != static_cast<long long>(n) * d) return false;
  for (int i = 0; i < static_cast<int>(mate.size()); ++i) {
    int j = mate[i];
    if (j < 0 || j >= static_cast<int>(mate.size()) || j == i || mate[j] != i) return false;
  }
  return true;
}

MultiGraph MultiGraph::from_edges(int n, int d, std::vector<std::pair<int, int>> edges) {
  MultiGraph g;
  g.n = n;
  g.d = d;
  g.loops.assign(n, 0);
  g.adj_off.assign(n + 1, 0);
  for (auto& e : edges) {
    if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n)
      throw dimension_error("edge endpoint out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) {
      ++g.loops[e.first];
    } else {
      ++g.adj_off[e.first + 1];
      ++g.adj_off[e.second + 1];
    }
  }
  for (int v = 0; v < n; ++v) g.adj_off[v + 1] += g.adj_off[v];
  g.adj.resize(g.adj_off[n]);
  std::vector<int> fill(g.adj_off.begin(), g.adj_off.end() - 1);
  for (const auto& e : edges) {
    if (e.first == e.second) continue;
    g.adj[fill[e.first]++] = e.second;
    g.adj[fill[e.second]++] = e.first;
  }
  for (int v = 0; v < n; ++v) std::sort(g.adj.begin() + g.adj_off[v], g.adj.begin() + g.adj_off[v + 1]);
  g.simple = true;
  for (int v = 0; v < n && g.simple; ++v) {
    if (g.loops[v]) g.simple = false;
    for (int k = g.adj_off[v] + 1; k < g.adj_off[v + 1]; ++k)
      if (g.adj[k] == g.adj[k - 1]) g.simple = false;
  }
  g.edges = std::move(edges);
  return g;
}

int MultiGraph::loop_count() const {
  int s = 0;
  for (int l : loops) s += l;
  return s;
}

Pairing sample_pairing(const ModelParams& p, Rng& rng) {
  const int m = static_cast<int>(p.half_edges());
  if (m % 2) throw parity_error("d*n must be even");
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Pairing pg{p.n, p.d, std::vector<int>(m)};
  for (int k = 0; k < m; k += 2) {
    pg.mate[perm[k]] = perm[k + 1];
    pg.mate[perm[k + 1]] = perm[k];
  }
  return pg;
}

MultiGraph merge(const Pairing& pg) {
  std::vector<std::pair<int, int>> e;
  e.reserve(pg.mate.size() / 2);
  for (int i = 0; i < static_cast<int>(pg.mate.size()); ++i)
    if (i < pg.mate[i]) e.emplace_back(pg.vertex(i), pg.vertex(pg.mate[i]));
  return MultiGraph::from_edges(pg.n, pg.d, std::move(e));
}

bool is_simple(const Pairing& pg) {
  std::vector<int> nb(pg.d);
  for (int v = 0; v < pg.n; ++v) {
    for (int k = 0; k < pg.d; ++k) {
      int u = pg.vertex(pg.mate[v * pg.d + k]);
      if (u == v) return false;
      for (int j = 0; j < k; ++j)
        if (nb[j] == u) return false;
      nb[k] = u;
    }
  }
  return true;
}

SimpleSample sample_simple_regular(const ModelParams& p, Rng& rng, int max_tries) {
  for (int t = 1; t <= max_tries; ++t) {
    Pairing pg = sample_pairing(p, rng);
    if (is_simple(pg)) return {merge(pg), t};
  }
  throw retry_limit_error("no simple graph after " + std::to_string(max_tries) + " pairings");
}

namespace {

void enum_rec(Pairing& pg, int from, std::uint64_t& count, const std::function<void(const Pairing&)>& visit) {
  const int m = static_cast<int>(pg.mate.size());
  int i = from;
  while (i < m && pg.mate[i] >= 0) ++i;
  if (i == m) {
    ++count;
    visit(pg);
    return;
  }
  for (int j = i + 1; j < m; ++j) {
    if (pg.mate[j] >= 0) continue;
    pg.mate[i] = j;
    pg.mate[j] = i;
    enum_rec(pg, i + 1, count, visit);
    pg.mate[i] = pg.mate[j] = -1;
  }
}

}  // namespace

std::uint64_t enumerate_pairings(const ModelParams& p, const std::function<void(const Pairing&)>& visit, int cap) {
  if (p.half_edges() > cap)
    throw capacity_error("pairing enumeration limited to d*n <= " + std::to_string(cap));
  Pairing pg{p.n, p.d, std::vector<int>(p.half_edges(), -1)};
  std::uint64_t count = 0;
  enum_rec(pg, 0, count, visit);
  return count;
}

namespace {

struct CycleDfs {
  const std::vector<std::vector<int>>& nb;
  int lmax;
  int root = 0;
  std::vector<int> path;
  std::vector<char> on;
  std::vector<long long>& c;

  void go(int u) {
    const int len = static_cast<int>(path.size());
    for (int w : nb[u]) {
      if (w == root) {
        // Each cycle is seen twice from its root; keep the direction whose
        // second vertex is smaller than its last.
        if (len >= 3 && path[1] < path[len - 1]) ++c[len];
      } else if (w > root && !on[w] && len < lmax) {
        on[w] = 1;
        path.push_back(w);
        go(w);
        path.pop_back();
        on[w] = 0;
      }
    }
  }
};

}  // namespace

CycleCensus count_cycles(const MultiGraph& g, int lmax) {
  if (lmax < 1 || lmax > kCycleLmaxCap) throw domain_error("lmax must lie in [1, 12]");
  CycleCensus cc{lmax, std::vector<long long>(lmax + 1, 0)};
  cc.c[1] = g.loop_count();
  std::vector<std::vector<int>> nb(g.n);
  for (int v = 0; v < g.n; ++v) {
    for (const int* p = g.nbr_begin(v); p != g.nbr_end(v);) {
      const int* q = p;
      while (q != g.nbr_end(v) && *q == *p) ++q;
      long long m = q - p;
      if (v < *p && lmax >= 2) cc.c[2] += m * (m - 1) / 2;
      nb[v].push_back(*p);
      p = q;
    }
  }
  if (lmax >= 3) {
    CycleDfs dfs{nb, lmax, 0, {}, std::vector<char>(g.n, 0), cc.c};
    for (int r = 0; r < g.n; ++r) {
      dfs.root = r;
      dfs.path.assign(1, r);
      dfs.on[r] = 1;
      dfs.go(r);
      dfs.on[r] = 0;
    }
  }
  return cc;
}

void write_edge_list(std::ostream& os, const MultiGraph& g) {
  os << g.n << ' ' << g.d << '\n';
  for (const auto& e : g.edges) os << e.first << ' ' << e.second << '\n';
}

MultiGraph read_edge_list(std::istream& is) {
  int n = 0, d = 0;
  if (!(is >> n >> d)) throw dimension_error("missing 'n d' header");
  std::vector<std::pair<int, int>> e;
  int u, v;
  while (is >> u >> v) e.emplace_back(u, v);
  return MultiGraph::from_edges(n, d, std::move(e));
}

MultiGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return MultiGraph::from_edges(n, n - 1, std::move(e));
}

MultiGraph petersen_graph() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);          // outer cycle
    e.emplace_back(i, i + 5);                // spokes
    e.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
  }
  return MultiGraph::from_edges(10, 3, std::move(e));
}

}  // namespace rrg
