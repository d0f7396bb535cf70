#pragma once

#include <gmpxx.h>

#include <array>
#include <functional>

#include "rrg/params.hpp"
#include "rrg/planted.hpp"
#include "rrg/poly.hpp"

namespace rrg {

constexpr int kFirstMomentCap = 200;
constexpr int kSecondMomentCap = 16;

// One (rho_+, mu) class of the first-moment sum. Counts are numbers of edges
// of each type; mu_pm_count is the number of mixed edges.
struct FirstMomentTerm {
  int rho_plus_count = 0;
  long mu_pp_count = 0, mu_mm_count = 0, mu_pm_count = 0;
  mpq_class coefficient;  // already divided by (dn-1)!!
  int x_power = 0;
};

// One 16-type class of the second-moment sum. x[0..8] are edge counts in the
// order (+-,-+), (++,--), (++,+-), (++,-+), (+-,--), (-+,--), (+-,+-), (-+,-+),
// (++,++); mm_mm is the (--,--) count. Vertex-type counts in pair_type order.
struct SecondMomentTerm {
  std::array<long, 9> x{};
  long mm_mm = 0;
  std::array<int, 4> rho_count{};
  mpq_class coefficient;
  int x_power = 0;
};

mpz_class factorial(long k);
// (2k-1)!! = (2k)! / (k! 2^k); equals 1 at k = 0.
mpz_class double_factorial_odd(long k);

void for_each_first_moment_term(const ModelParams& p, const std::function<void(const FirstMomentTerm&)>& visit);
PolynomialInX first_moment_exact(const ModelParams& p);

void for_each_second_moment_term(const ModelParams& p, const std::function<void(const SecondMomentTerm&)>& visit);
PolynomialInX second_moment_exact(const ModelParams& p);

// E[Z] and E[Z^2] over the pairing model by enumerating every pairing.
struct PairingMoments {
  PolynomialInX first, second;
  std::uint64_t pairings = 0;
};
PairingMoments pairing_moments_bruteforce(const ModelParams& p);

// Probability that l_pp given disjoint ++ half-edge pairs, l - M - l_pp given --
// pairs and M given mixed pairs are all matched, in a uniform pairing whose edge
// type counts are fixed by mu (and whose spins realize mu's rho).
double planted_edge_placement_prob(const ModelParams& p, int l, int M, int l_pp, const EdgeTypeStats2& mu);
double planted_edge_placement_prob(const ModelParams& p, int l, int M, const EdgeTypeStats2& mu);
// (2/dn)^l (x/(1+x))^(l-M) (1/(1+x))^M.
double planted_edge_placement_prob_asymptotic(const ModelParams& p, int l, int M);
// Expected number of potential l-cycles with M mixed edges when rho = 1/2.
double cycle_placement_count_asymptotic(const ModelParams& p, int l, int M);

double planted_cycle_moment(const ModelParams& p, int l);
double planted_cycle_moment_closed(const ModelParams& p, int l);

}  // namespace rrg
