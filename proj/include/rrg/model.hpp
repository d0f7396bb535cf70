#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rrg/graph.hpp"
#include "rrg/params.hpp"
#include "rrg/poly.hpp"
#include "rrg/rng.hpp"

namespace rrg {

// Entries are +1 / -1.
using SpinConfig = std::vector<std::int8_t>;

void check_spins(const SpinConfig& s);
SpinConfig uniform_spins(int n, Rng& rng);

// Monochromatic edges with multiplicity; every loop counts 1.
long long hamiltonian(const MultiGraph& g, const SpinConfig& sigma);

constexpr int kExactZCap = 28;

// hist[k] = #{sigma : H(sigma) = k}, by Gray-code enumeration.
std::vector<std::uint64_t> energy_histogram(const MultiGraph& g, int cap = kExactZCap);
PolynomialInX partition_polynomial(const MultiGraph& g, int cap = kExactZCap);
double partition_function(const MultiGraph& g, double beta, int cap = kExactZCap);
double log_partition_function(const MultiGraph& g, double beta, int cap = kExactZCap);

// Walks all 2^n configurations in Gray-code order starting from all +1,
// reporting (step, sigma, H) with H maintained incrementally.
void gray_code_walk(const MultiGraph& g, const std::function<void(std::uint64_t, const SpinConfig&, long long)>& visit,
                    int cap = kExactZCap);

double boltzmann_logprob(const MultiGraph& g, const SpinConfig& sigma, const ModelParams& p,
                         std::optional<double> log_z = std::nullopt);

// One heat-bath sweep in vertex order 0..n-1.
void gibbs_sweep(const MultiGraph& g, SpinConfig& sigma, const ModelParams& p, Rng& rng);

// Probability that single-site heat-bath sets v to +1 given the rest.
double heat_bath_plus_prob(const MultiGraph& g, const SpinConfig& sigma, int v, double beta);

long long overlap(const SpinConfig& sigma, const SpinConfig& tau);

}  // namespace rrg
