#include "rrg/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrg/graph.hpp"
#include "rrg/model.hpp"

namespace rrg {

mpz_class factorial(long k) {
  if (k < 0) throw domain_error("factorial of negative number");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

mpz_class double_factorial_odd(long k) {
  if (k < 0) throw domain_error("double factorial of negative number");
  mpz_class r = factorial(2 * k) / factorial(k);
  mpz_class two_k;
  mpz_ui_pow_ui(two_k.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return r / two_k;
}

namespace {

void check_moment_params(const ModelParams& p, int cap, const char* what) {
  if (p.n > cap) throw capacity_error(std::string(what) + " limited to n <= " + std::to_string(cap));
  if (p.half_edges() % 2) throw parity_error("d*n must be even");
}

std::vector<mpz_class> factorial_table(long m) {
  std::vector<mpz_class> f(m + 1);
  f[0] = 1;
  for (long k = 1; k <= m; ++k) f[k] = f[k - 1] * k;
  return f;
}

mpz_class binom(const std::vector<mpz_class>& f, long a, long b) { return f[a] / (f[b] * f[a - b]); }

}  // namespace

void for_each_first_moment_term(const ModelParams& p, const std::function<void(const FirstMomentTerm&)>& visit) {
  check_moment_params(p, kFirstMomentCap, "first_moment_exact");
  const long n = p.n, d = p.d, dn = n * d;
  const auto f = factorial_table(dn);
  const mpz_class all = double_factorial_odd(dn / 2);
  for (long np = 0; np <= n; ++np) {
    const long Dp = d * np, Dm = d * (n - np);
    const mpz_class cn = binom(f, n, np);
    for (long mpp = 0; 2 * mpp <= Dp; ++mpp) {
      const long mpm = Dp - 2 * mpp;
      if (mpm > Dm || (Dm - mpm) % 2) continue;
      const long mmm = (Dm - mpm) / 2;
      mpz_class num = cn * double_factorial_odd(mpp) * double_factorial_odd(mmm) * f[mpm] * binom(f, Dp, 2 * mpp) *
                      binom(f, Dm, 2 * mmm);
      FirstMomentTerm t;
      t.rho_plus_count = static_cast<int>(np);
      t.mu_pp_count = mpp;
      t.mu_mm_count = mmm;
      t.mu_pm_count = mpm;
      t.coefficient = mpq_class(num, all);
      t.coefficient.canonicalize();
      t.x_power = static_cast<int>(mpp + mmm);
      visit(t);
    }
  }
}

PolynomialInX first_moment_exact(const ModelParams& p) {
  check_moment_params(p, kFirstMomentCap, "first_moment_exact");
  std::map<int, mpq_class> acc;
  for_each_first_moment_term(p, [&](const FirstMomentTerm& t) { acc[t.x_power] += t.coefficient; });
  PolynomialInX poly;
  for (auto& [k, c] : acc) poly.add_term(k, c);
  return poly;
}

namespace {

// Visits every admissible (n_a, m_ab) with the integer pairing count
// T = prod_a (d n_a)! / (prod_a m_aa! 2^m_aa prod_{a<b} m_ab!) times n!/prod n_a!.
// Vertex types follow pair_type; edge (a,b) has 2 - popcount(a^b) monochromatic spins.
template <class F>
void second_moment_walk(const ModelParams& p, F&& f) {
  const long n = p.n, d = p.d, dn = n * d;
  const auto fa = factorial_table(std::max(dn, n));
  mpz_class num, d1, d2, d3, d4, d5, d6, den, t;
  long m[4][4] = {};
  std::array<int, 4> na{};
  for (long n0 = 0; n0 <= n; ++n0)
    for (long n1 = 0; n0 + n1 <= n; ++n1)
      for (long n2 = 0; n0 + n1 + n2 <= n; ++n2) {
        const long n3 = n - n0 - n1 - n2;
        na = {static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n2), static_cast<int>(n3)};
        const long D0 = d * n0, D1 = d * n1, D2 = d * n2, D3 = d * n3;
        num = fa[n] / (fa[n0] * fa[n1] * fa[n2] * fa[n3]);
        num *= fa[D0] * fa[D1] * fa[D2] * fa[D3];
        for (long m01 = 0; m01 <= std::min(D0, D1); ++m01) {
          d1 = fa[m01];
          const long r0 = D0 - m01, r1 = D1 - m01;
          for (long m02 = 0; m02 <= std::min(r0, D2); ++m02) {
            d2 = d1 * fa[m02];
            const long r0b = r0 - m02, r2 = D2 - m02;
            for (long m03 = r0b % 2; m03 <= std::min(r0b, D3); m03 += 2) {
              d3 = d2 * fa[m03];
              const long m00 = (r0b - m03) / 2, r3 = D3 - m03;
              for (long m12 = 0; m12 <= std::min(r1, r2); ++m12) {
                d4 = d3 * fa[m12];
                const long r1b = r1 - m12, r2b = r2 - m12;
                for (long m13 = r1b % 2; m13 <= std::min(r1b, r3); m13 += 2) {
                  d5 = d4 * fa[m13];
                  const long m11 = (r1b - m13) / 2, r3b = r3 - m13;
                  for (long m23 = r2b % 2; m23 <= std::min(r2b, r3b); m23 += 2) {
                    const long r3c = r3b - m23;
                    if (r3c % 2) continue;
                    const long m22 = (r2b - m23) / 2, m33 = r3c / 2;
                    d6 = d5 * fa[m23];
                    den = d6 * fa[m00];
                    den *= fa[m11];
                    den *= fa[m22];
                    den *= fa[m33];
                    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(m00 + m11 + m22 + m33));
                    mpz_divexact(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
                    const int power = static_cast<int>(m01 + m02 + m13 + m23 + 2 * (m00 + m11 + m22 + m33));
                    m[0][0] = m00, m[1][1] = m11, m[2][2] = m22, m[3][3] = m33;
                    m[0][1] = m01, m[0][2] = m02, m[0][3] = m03, m[1][2] = m12, m[1][3] = m13, m[2][3] = m23;
                    f(na, m, t, power);
                  }
                }
              }
            }
          }
        }
      }
}

}  // namespace

void for_each_second_moment_term(const ModelParams& p, const std::function<void(const SecondMomentTerm&)>& visit) {
  check_moment_params(p, kSecondMomentCap, "second_moment_exact");
  const mpz_class all = double_factorial_odd(p.half_edges() / 2);
  second_moment_walk(p, [&](const std::array<int, 4>& na, const long (&m)[4][4], const mpz_class& t, int power) {
    SecondMomentTerm s;
    s.x = {m[1][2], m[0][3], m[0][1], m[0][2], m[1][3], m[2][3], m[1][1], m[2][2], m[0][0]};
    s.mm_mm = m[3][3];
    s.rho_count = na;
    s.coefficient = mpq_class(t, all);
    s.coefficient.canonicalize();
    s.x_power = power;
    visit(s);
  });
}

PolynomialInX second_moment_exact(const ModelParams& p) {
  check_moment_params(p, kSecondMomentCap, "second_moment_exact");
  std::vector<mpz_class> acc(p.half_edges() + 1, 0);
  second_moment_walk(p, [&](const std::array<int, 4>&, const long (&)[4][4], const mpz_class& t, int power) {
    acc[power] += t;
  });
  const mpz_class all = double_factorial_odd(p.half_edges() / 2);
  PolynomialInX poly;
  for (size_t k = 0; k < acc.size(); ++k) {
    mpq_class q(acc[k], all);
    q.canonicalize();
    poly.add_term(static_cast<int>(k), q);
  }
  return poly;
}

PairingMoments pairing_moments_bruteforce(const ModelParams& p) {
  // Z factorizes over connected components: histogram each distinct component
  // once (vertices relabeled in increasing order), and count graphs by their
  // multiset of component ids.
  std::map<std::vector<std::pair<int, int>>, int> comp_id;
  std::vector<std::vector<std::uint64_t>> comp_hist;
  std::map<std::vector<int>, std::uint64_t> graphs;
  std::vector<int> parent(p.n), local(p.n);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  PairingMoments out;
  out.pairings = enumerate_pairings(p, [&](const Pairing& pg) {
    for (int v = 0; v < p.n; ++v) parent[v] = v;
    std::vector<std::pair<int, int>> e;
    e.reserve(pg.mate.size() / 2);
    for (int i = 0; i < static_cast<int>(pg.mate.size()); ++i) {
      const int j = pg.mate[i];
      if (i < j) {
        int u = pg.vertex(i), v = pg.vertex(j);
        if (u > v) std::swap(u, v);
        e.emplace_back(u, v);
        parent[find(u)] = find(v);
      }
    }
    std::map<int, std::vector<std::pair<int, int>>> by_root;
    for (const auto& [u, v] : e) by_root[find(u)].emplace_back(u, v);
    std::vector<int> sig;
    for (auto& [root, ce] : by_root) {
      std::vector<int> verts;
      for (const auto& [u, v] : ce) verts.push_back(u), verts.push_back(v);
      std::sort(verts.begin(), verts.end());
      verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
      for (int k = 0; k < static_cast<int>(verts.size()); ++k) local[verts[k]] = k;
      for (auto& [u, v] : ce) u = local[u], v = local[v];
      std::sort(ce.begin(), ce.end());
      auto [it, fresh] = comp_id.try_emplace(ce, static_cast<int>(comp_hist.size()));
      if (fresh) comp_hist.push_back(energy_histogram(MultiGraph::from_edges(static_cast<int>(verts.size()), p.d, ce)));
      sig.push_back(it->second);
    }
    std::sort(sig.begin(), sig.end());
    ++graphs[sig];
  });
  std::vector<mpz_class> z1(p.edges() + 1, 0), z2(2 * p.edges() + 1, 0);
  for (const auto& [sig, cnt] : graphs) {
    std::vector<mpz_class> h{1};
    for (int id : sig) {
      const auto& ch = comp_hist[id];
      std::vector<mpz_class> r(h.size() + ch.size() - 1, 0);
      for (size_t i = 0; i < h.size(); ++i)
        for (size_t j = 0; j < ch.size(); ++j)
          if (ch[j]) r[i + j] += h[i] * mpz_class(std::to_string(ch[j]));
      h = std::move(r);
    }
    const mpz_class c(std::to_string(cnt));
    for (size_t i = 0; i < h.size(); ++i) {
      if (h[i] == 0) continue;
      z1[i] += c * h[i];
      for (size_t j = 0; j < h.size(); ++j)
        if (h[j] != 0) z2[i + j] += c * h[i] * h[j];
    }
  }
  const mpz_class all(std::to_string(out.pairings));
  for (size_t k = 0; k < z1.size(); ++k) {
    mpq_class q(z1[k], all);
    q.canonicalize();
    out.first.add_term(static_cast<int>(k), q);
  }
  for (size_t k = 0; k < z2.size(); ++k) {
    mpq_class q(z2[k], all);
    q.canonicalize();
    out.second.add_term(static_cast<int>(k), q);
  }
  return out;
}

double planted_edge_placement_prob(const ModelParams& p, int l, int M, int l_pp, const EdgeTypeStats2& mu) {
  if (M % 2) throw domain_error("M must be even");
  if (l < 1 || M < 0 || M > l || l_pp < 0 || l_pp > l - M) throw domain_error("need 0 <= M <= l and 0 <= l_pp <= l - M");
  const mpq_class dn(static_cast<long>(p.half_edges()));
  auto count = [](const mpq_class& q) {
    if (q.get_den() != 1) throw domain_error("mu not integral for (n, d)");
    return q.get_num().get_si();
  };
  const long mpp = count(mu.mu_pp * dn / 2), mmm = count(mu.mu_mm * dn / 2), mpm = count(mu.mu_pm * dn);
  const long Dp = count(mu.rho_p * dn), Dm = count(mu.rho_m * dn);
  const int l_mm = l - M - l_pp;
  // Falling factorial (a)_k; negative factors make the placement impossible.
  auto ff = [](long a, long k) {
    if (k > a) throw domain_error("falling factorial with too few items: placement impossible");
    long double r = 1;
    for (long i = 0; i < k; ++i) r *= static_cast<long double>(a - i);
    return r;
  };
  long double num = std::pow(2.0L, l - M) * ff(mpp, l_pp) * ff(mmm, l_mm) * ff(Dp - 2 * mpp, M) * ff(Dm - 2 * mmm, M);
  long double den = ff(Dp, 2 * l_pp + M) * ff(Dm, 2 * l_mm + M) * ff(mpm, M);
  return static_cast<double>(num / den);
}

double planted_edge_placement_prob(const ModelParams& p, int l, int M, const EdgeTypeStats2& mu) {
  return planted_edge_placement_prob(p, l, M, (l - M) / 2, mu);
}

double planted_edge_placement_prob_asymptotic(const ModelParams& p, int l, int M) {
  if (M % 2) throw domain_error("M must be even");
  const double x = p.x;
  return std::pow(2.0 / static_cast<double>(p.half_edges()), l) * std::pow(x / (1 + x), l - M) *
         std::pow(1 / (1 + x), M);
}

double cycle_placement_count_asymptotic(const ModelParams& p, int l, int M) {
  // n^l / (2l) vertex sequences, d(d-1) half-edge choices per vertex, and a
  // fraction 2 C(l,M) / 2^l of spin patterns with M sign changes.
  const double n = p.n, d = p.d;
  const double binom = std::tgamma(l + 1.0) / (std::tgamma(M + 1.0) * std::tgamma(l - M + 1.0));
  return std::pow(n * d * (d - 1), l) / (2.0 * l) * 2 * binom / std::pow(2.0, l);
}

double planted_cycle_moment(const ModelParams& p, int l) {
  if (l < 3) throw domain_error("cycle length must be >= 3");
  double s = 0;
  for (int M = 0; M <= l; M += 2)
    s += cycle_placement_count_asymptotic(p, l, M) * planted_edge_placement_prob_asymptotic(p, l, M);
  const double closed = planted_cycle_moment_closed(p, l);
  if (std::abs(s - closed) > 1e-9 * std::abs(closed))
    throw std::logic_error("cycle moment: binomial assembly disagrees with closed form");
  return s;
}

double planted_cycle_moment_closed(const ModelParams& p, int l) {
  const double x = p.x;
  return std::pow(p.d - 1.0, l) / (2.0 * l) * (1 + std::pow((x - 1) / (x + 1), l));
}

}  // namespace rrg
