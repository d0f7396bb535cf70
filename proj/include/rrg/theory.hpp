#pragma once

#include <vector>

#include "rrg/params.hpp"
#include "rrg/rng.hpp"

namespace rrg {

double beta_ks(int d);

struct CycleLawParams {
  int d = 0;
  double beta = 0;
  int imax = 0;
  std::vector<double> lambda;  // index i, 1 <= i <= imax
  std::vector<double> delta;
  double tail_mean = 0;    // sum_{i>imax} lambda_i |delta_i|
  double tail_second = 0;  // sum_{i>imax} lambda_i delta_i^2
};

CycleLawParams cycle_law_params(const ModelParams& p, int imax);

// log of (prefactor * exp(n * rate)) times exp(correction).
struct MomentAsymptotics {
  double log_prefactor = 0;
  double rate = 0;
  double correction = 0;
  bool theory_valid = true;  // false for beta >= beta_KS

  double total(long long n) const { return correction + log_prefactor + static_cast<double>(n) * rate; }
  // Same without the short-cycle correction: the pairing-model quantity.
  double pairing_total(long long n) const { return log_prefactor + static_cast<double>(n) * rate; }
};

MomentAsymptotics first_moment_asymptotic(const ModelParams& p);
MomentAsymptotics second_moment_asymptotic(const ModelParams& p);

// exp(sum_{i>=3} lambda_i delta_i^2) in closed form; throws past beta_KS.
double moment_ratio_limit(const ModelParams& p);
double moment_ratio_log(const ModelParams& p);
// Partial sum sum_{i=3}^{imax} lambda_i delta_i^2.
double moment_ratio_log_series(const ModelParams& p, int imax);

enum class SimplicityVariant { null_model, planted1, planted2 };
double simplicity_probability(const ModelParams& p, SimplicityVariant v);

double centering(const ModelParams& p, long long n);

struct WSample {
  double log_w = 0;
  std::vector<int> cycle_draws;  // Lambda_i for i = 3..imax, stored at index i - 3
  double tail_bound_mean = 0;     // sum_{i>imax} lambda_i |delta_i|
  double tail_bound_second = 0;   // sum_{i>imax} lambda_i delta_i^2
};

WSample sample_log_w(const CycleLawParams& c, Rng& rng);

// Poisson draw via std::poisson_distribution on the given stream.
int poisson(double mean, Rng& rng);

}  // namespace rrg
