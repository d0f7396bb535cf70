#include "rrg/planted.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "rrg/errors.hpp"

namespace rrg {

EdgeTypeStats2Real to_real(const EdgeTypeStats2& s) {
  return {s.mu_pp.get_d(), s.mu_mm.get_d(), s.mu_pm.get_d(), s.rho_p.get_d(), s.rho_m.get_d()};
}

bool check_invariants(const EdgeTypeStats2& s, int n, int d) {
  const mpq_class dn = static_cast<long>(n) * d;
  if (s.mu_pp + s.mu_mm + 2 * s.mu_pm != 1) return false;
  if (s.mu_pp + s.mu_pm != s.rho_p || s.mu_mm + s.mu_pm != s.rho_m) return false;
  auto integral = [](const mpq_class& q) { return q.get_den() == 1; };
  return integral(s.mu_pp * dn / 2) && integral(s.mu_mm * dn / 2) && integral(s.mu_pm * dn) && sgn(s.mu_pp) >= 0 &&
         sgn(s.mu_mm) >= 0 && sgn(s.mu_pm) >= 0;
}

bool check_invariants(const EdgeTypeStats16& s) {
  mpq_class tot = 0, rtot = 0;
  for (int a = 0; a < 4; ++a) {
    mpq_class row = 0;
    for (int b = 0; b < 4; ++b) {
      if (s.mu[a * 4 + b] != s.mu[b * 4 + a] || sgn(s.mu[a * 4 + b]) < 0) return false;
      row += s.mu[a * 4 + b];
    }
    if (row != s.rho[a]) return false;
    tot += row;
    rtot += s.rho[a];
  }
  return tot == 1 && rtot == 1;
}

EdgeTypeStats2Real mu_hat(const ModelParams& p) {
  const double x = p.x;
  return {x / (2 * (1 + x)), x / (2 * (1 + x)), 1 / (2 * (1 + x)), 0.5, 0.5};
}

EdgeTypeStats2 edge_type_stats(const MultiGraph& g, const SpinConfig& sigma) {
  if (static_cast<int>(sigma.size()) != g.n) throw dimension_error("spin config length differs from vertex count");
  long pp = 0, mm = 0, pm = 0;
  for (const auto& [u, v] : g.edges) {
    if (sigma[u] != sigma[v])
      ++pm;
    else if (sigma[u] > 0)
      ++pp;
    else
      ++mm;
  }
  const long dn = 2 * static_cast<long>(g.edges.size());
  EdgeTypeStats2 s;
  s.mu_pp = mpq_class(2 * pp, dn);
  s.mu_mm = mpq_class(2 * mm, dn);
  s.mu_pm = mpq_class(pm, dn);
  for (auto* q : {&s.mu_pp, &s.mu_mm, &s.mu_pm}) q->canonicalize();
  s.rho_p = s.mu_pp + s.mu_pm;
  s.rho_m = s.mu_mm + s.mu_pm;
  return s;
}

EdgeTypeStats16 edge_type_stats16(const MultiGraph& g, const SpinConfig& sigma, const SpinConfig& tau) {
  if (static_cast<int>(sigma.size()) != g.n || static_cast<int>(tau.size()) != g.n)
    throw dimension_error("spin config length differs from vertex count");
  std::array<long, 16> cnt{};
  for (const auto& [u, v] : g.edges) {
    int a = pair_type(sigma[u], tau[u]), b = pair_type(sigma[v], tau[v]);
    ++cnt[a * 4 + b];
    ++cnt[b * 4 + a];
  }
  const long dn = 2 * static_cast<long>(g.edges.size());
  EdgeTypeStats16 s;
  for (int k = 0; k < 16; ++k) {
    s.mu[k] = mpq_class(cnt[k], dn);
    s.mu[k].canonicalize();
  }
  for (int a = 0; a < 4; ++a) {
    s.rho[a] = 0;
    for (int b = 0; b < 4; ++b) s.rho[a] += s.mu[a * 4 + b];
  }
  return s;
}

double distance_to_muhat(const EdgeTypeStats2& s, const ModelParams& p) {
  auto h = mu_hat(p);
  auto r = to_real(s);
  return std::max({std::abs(r.mu_pp - h.mu_pp), std::abs(r.mu_mm - h.mu_mm), std::abs(r.mu_pm - h.mu_pm)});
}

PlantedSampleReport planted_report(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& p) {
  PlantedSampleReport r{g, sigma, edge_type_stats(g, sigma), 0};
  r.distance_to_muhat = distance_to_muhat(r.mu_stats, p);
  return r;
}

nlohmann::json PlantedSampleReport::to_json() const {
  nlohmann::json j;
  j["n"] = graph.n;
  j["d"] = graph.d;
  nlohmann::json e = nlohmann::json::array();
  for (const auto& [u, v] : graph.edges) e.push_back({u, v});
  j["edges"] = e;
  j["sigma"] = std::vector<int>(sigma.begin(), sigma.end());
  j["mu"] = {{"mu_pp", mu_stats.mu_pp.get_str()},
             {"mu_mm", mu_stats.mu_mm.get_str()},
             {"mu_pm", mu_stats.mu_pm.get_str()},
             {"rho_p", mu_stats.rho_p.get_str()},
             {"rho_m", mu_stats.rho_m.get_str()}};
  j["distance_to_muhat"] = distance_to_muhat;
  return j;
}

namespace {

long long pairing_energy(const Pairing& pg, const SpinConfig& sigma) {
  long long h = 0;
  for (int i = 0; i < static_cast<int>(pg.mate.size()); ++i)
    if (i < pg.mate[i]) h += sigma[pg.vertex(i)] == sigma[pg.vertex(pg.mate[i])];
  return h;
}

void check_sigma(const ModelParams& p, const SpinConfig& sigma) {
  if (static_cast<int>(sigma.size()) != p.n) throw dimension_error("spin config length differs from n");
  check_spins(sigma);
}

}  // namespace

std::uint64_t pairing_key(const Pairing& pg) {
  if (pg.mate.size() > 16) throw capacity_error("pairing_key needs d*n <= 16");
  std::uint64_t k = 0;
  for (size_t i = 0; i < pg.mate.size(); ++i) k |= static_cast<std::uint64_t>(pg.mate[i]) << (4 * i);
  return k;
}

ExactPlantedSampler::ExactPlantedSampler(const ModelParams& p, const SpinConfig& sigma) : p_(p), sigma_(sigma) {
  check_sigma(p, sigma);
  by_h_.assign(p.edges() + 1, {});
  total_ = enumerate_pairings(p, [&](const Pairing& pg) {
    auto h = pairing_energy(pg, sigma_);
    by_h_[h].emplace_back(pg.mate.begin(), pg.mate.end());
  });
  cum_.resize(by_h_.size());
  double acc = 0;
  for (size_t h = 0; h < by_h_.size(); ++h) {
    acc += static_cast<double>(by_h_[h].size()) * std::pow(p.x, static_cast<double>(h));
    cum_[h] = acc;
  }
  norm_ = acc;
}

Pairing ExactPlantedSampler::sample(Rng& rng) const {
  double u = rng.uniform() * norm_;
  size_t h = std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
  while (h >= by_h_.size() || by_h_[h].empty()) h = h >= by_h_.size() ? by_h_.size() - 1 : h - 1;
  const auto& m = by_h_[h][rng.below(by_h_[h].size())];
  return Pairing{p_.n, p_.d, std::vector<int>(m.begin(), m.end())};
}

double ExactPlantedSampler::probability(const Pairing& pg) const {
  return std::pow(p_.x, static_cast<double>(pairing_energy(pg, sigma_))) / norm_;
}

Pairing sample_planted_exact(const ModelParams& p, const SpinConfig& sigma, Rng& rng) {
  return ExactPlantedSampler(p, sigma).sample(rng);
}

Pairing sample_planted_counts(const ModelParams& p, const SpinConfig& sigma, Rng& rng) {
  check_sigma(p, sigma);
  const int d = p.d;
  std::vector<int> plus, minus;
  for (int v = 0; v < p.n; ++v)
    for (int k = 0; k < d; ++k) (sigma[v] > 0 ? plus : minus).push_back(v * d + k);
  const int dp = static_cast<int>(plus.size()), dm = static_cast<int>(minus.size());
  auto ldf = [](int k) { return std::lgamma(2.0 * k + 1) - std::lgamma(k + 1.0) - k * std::log(2.0); };
  auto lf = [](int k) { return std::lgamma(k + 1.0); };
  const double lx = -p.beta;
  std::vector<int> mix;
  std::vector<double> lw;
  for (int mpm = dp % 2; mpm <= std::min(dp, dm); mpm += 2) {
    int mpp = (dp - mpm) / 2, mmm = (dm - mpm) / 2;
    double w = lf(dp) - lf(dp - mpm) + lf(dm) - lf(mpm) - lf(dm - mpm) + ldf(mpp) + ldf(mmm) + (mpp + mmm) * lx;
    mix.push_back(mpm);
    lw.push_back(w);
  }
  double mx = *std::max_element(lw.begin(), lw.end());
  double tot = 0;
  for (double& w : lw) tot += (w = std::exp(w - mx));
  double u = rng.uniform() * tot;
  size_t k = 0;
  for (; k + 1 < lw.size() && u >= lw[k]; ++k) u -= lw[k];
  const int mpm = mix[k];
  auto shuffle = [&](std::vector<int>& a) {
    for (int i = static_cast<int>(a.size()) - 1; i > 0; --i) std::swap(a[i], a[rng.below(i + 1)]);
  };
  shuffle(plus);
  shuffle(minus);
  Pairing pg{p.n, d, std::vector<int>(p.half_edges(), -1)};
  auto link = [&](int a, int b) {
    pg.mate[a] = b;
    pg.mate[b] = a;
  };
  for (int i = 0; i < mpm; ++i) link(plus[i], minus[i]);
  for (int i = mpm; i + 1 < dp; i += 2) link(plus[i], plus[i + 1]);
  for (int i = mpm; i + 1 < dm; i += 2) link(minus[i], minus[i + 1]);
  return pg;
}

SwapChain::SwapChain(const ModelParams& p, const std::vector<const SpinConfig*>& spins, const Pairing& start) : p_(p) {
  if (spins.empty() || spins.size() > 2) throw dimension_error("swap chain takes one or two spin configs");
  for (auto* s : spins) check_sigma(p, *s);
  if (!start.valid() || start.n != p.n || start.d != p.d) throw dimension_error("invalid starting pairing");
  const int m = static_cast<int>(p.half_edges());
  code_.resize(m);
  for (int i = 0; i < m; ++i) {
    int v = i / p.d;
    code_[i] = spins.size() == 1 ? ((*spins[0])[v] < 0) : pair_type((*spins[0])[v], (*spins[1])[v]);
  }
  const int k = static_cast<int>(spins.size());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) mono_[a][b] = k - std::popcount(static_cast<unsigned>(a ^ b));
  for (int j = 0; j < 9; ++j) accept_[j] = std::pow(p.x, j);
  for (int i = 0; i < m; ++i)
    if (i < start.mate[i]) {
      pairs_.push_back({i, start.mate[i]});
      h_ += mono_[code_[i]][code_[start.mate[i]]];
    }
}

void SwapChain::run(std::uint64_t proposals, Rng& rng) {
  const std::uint64_t m = pairs_.size();
  if (m < 2) return;
  for (std::uint64_t t = 0; t < proposals; ++t) {
    std::uint64_t r = rng();
    // Low bit picks the rewiring; the rest is reused for the first pair index.
    const bool cross = r & 1;
    std::uint64_t pi = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r >> 1) * m) >> 63);
    std::uint64_t qi = rng.below(m - 1);
    if (qi >= pi) ++qi;
    auto& P = pairs_[pi];
    auto& Q = pairs_[qi];
    const int a = P[0], b = P[1], c = Q[0], e = Q[1];
    const int old = mono_[code_[a]][code_[b]] + mono_[code_[c]][code_[e]];
    int nw;
    if (cross)
      nw = mono_[code_[a]][code_[c]] + mono_[code_[b]][code_[e]];
    else
      nw = mono_[code_[a]][code_[e]] + mono_[code_[b]][code_[c]];
    const int dh = nw - old;
    ++prop_;
    if (dh > 0 && rng.uniform() >= accept_[dh]) continue;
    if (cross) {
      P = {a, c};
      Q = {b, e};
    } else {
      P = {a, e};
      Q = {b, c};
    }
    h_ += dh;
    ++acc_;
  }
}

Pairing SwapChain::pairing() const {
  Pairing pg{p_.n, p_.d, std::vector<int>(p_.half_edges())};
  for (const auto& pr : pairs_) {
    pg.mate[pr[0]] = pr[1];
    pg.mate[pr[1]] = pr[0];
  }
  return pg;
}

std::uint64_t default_burnin(const ModelParams& p) {
  const double dn = static_cast<double>(p.half_edges());
  return static_cast<std::uint64_t>(std::ceil(20.0 * dn * std::log(std::max(dn, 2.0))));
}

Pairing sample_planted_mcmc(const ModelParams& p, const SpinConfig& sigma, Rng& rng, std::uint64_t steps,
                            std::uint64_t burnin) {
  SwapChain ch(p, {&sigma}, sample_pairing(p, rng));
  ch.run(burnin + steps, rng);
  return ch.pairing();
}

Pairing sample_planted_pair_mcmc(const ModelParams& p, const SpinConfig& sigma, const SpinConfig& tau, Rng& rng,
                                 std::uint64_t steps, std::uint64_t burnin) {
  SwapChain ch(p, {&sigma, &tau}, sample_pairing(p, rng));
  ch.run(burnin + steps, rng);
  return ch.pairing();
}

PlantedSimpleSample sample_planted_simple(const ModelParams& p, Rng& rng, PlantedMethod method, int max_tries,
                                          std::uint64_t steps, std::uint64_t burnin) {
  SpinConfig sigma = uniform_spins(p.n, rng);
  if (burnin == 0) burnin = default_burnin(p);
  std::optional<ExactPlantedSampler> exact;
  if (method == PlantedMethod::exact) exact.emplace(p, sigma);
  for (int t = 1; t <= max_tries; ++t) {
    Pairing pg;
    switch (method) {
      case PlantedMethod::exact: pg = exact->sample(rng); break;
      case PlantedMethod::counts: pg = sample_planted_counts(p, sigma, rng); break;
      case PlantedMethod::mcmc: pg = sample_planted_mcmc(p, sigma, rng, steps, burnin); break;
    }
    if (is_simple(pg)) return {merge(pg), sigma, t};
  }
  throw retry_limit_error("no simple planted graph after " + std::to_string(max_tries) + " attempts");
}

bool planted_pair_trial_simple(const ModelParams& p, Rng& rng, std::uint64_t burnin) {
  SpinConfig sigma = uniform_spins(p.n, rng);
  SpinConfig tau = uniform_spins(p.n, rng);
  if (burnin == 0) burnin = default_burnin(p);
  return is_simple(sample_planted_pair_mcmc(p, sigma, tau, rng, 0, burnin));
}

mpq_class nishimori_check(const ModelParams& p, const mpq_class& x) {
  if (p.half_edges() > 12) throw capacity_error("nishimori_check limited to d*n <= 12");
  if (sgn(x) <= 0 || x >= 1) throw domain_error("x must lie in (0, 1)");
  const int n = p.n;
  const std::uint64_t ns = 1ULL << n;
  std::vector<mpq_class> xp(p.edges() + 1);
  xp[0] = 1;
  for (size_t k = 1; k < xp.size(); ++k) xp[k] = xp[k - 1] * x;

  // H[g * ns + s] for every pairing g and spin pattern s (bit v set means -1).
  std::vector<std::uint8_t> H;
  std::vector<SpinConfig> spins(ns, SpinConfig(n));
  for (std::uint64_t s = 0; s < ns; ++s)
    for (int v = 0; v < n; ++v) spins[s][v] = ((s >> v) & 1) ? -1 : 1;
  std::uint64_t ng = enumerate_pairings(p, [&](const Pairing& pg) {
    for (std::uint64_t s = 0; s < ns; ++s) H.push_back(static_cast<std::uint8_t>(pairing_energy(pg, spins[s])));
  });

  std::vector<mpq_class> zg(ng, 0), ss(ns, 0);
  mpq_class total = 0;
  for (std::uint64_t g = 0; g < ng; ++g)
    for (std::uint64_t s = 0; s < ns; ++s) {
      const auto& w = xp[H[g * ns + s]];
      zg[g] += w;
      ss[s] += w;
    }
  for (const auto& z : zg) total += z;

  mpq_class worst = 0;
  for (std::uint64_t g = 0; g < ng; ++g) {
    const mpq_class pg_hat = zg[g] / total;
    for (std::uint64_t s = 0; s < ns; ++s) {
      const auto& w = xp[H[g * ns + s]];
      mpq_class lhs = pg_hat * (w / zg[g]);
      mpq_class rhs = (ss[s] / total) * (w / ss[s]);
      mpq_class diff = abs(lhs - rhs);
      if (diff > worst) worst = diff;
    }
  }
  return worst;
}

}  // namespace rrg
