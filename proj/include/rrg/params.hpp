#pragma once

#include <cmath>

#include "rrg/errors.hpp"

namespace rrg {

// (n, d, beta) with x = exp(-beta). n*d must be even.
struct ModelParams {
  int n = 0;
  int d = 0;
  double beta = 0.0;
  double x = 1.0;
  bool low_degree = false;  // d < 3: accepted, flagged

  ModelParams() = default;
  ModelParams(int n_, int d_, double beta_) : n(n_), d(d_), beta(beta_), x(std::exp(-beta_)) {
    if (n_ < 1) throw domain_error("n must be positive");
    if (d_ < 1) throw domain_error("d must be positive");
    if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw domain_error("beta must be finite and >= 0");
    if ((static_cast<long long>(n_) * d_) % 2 != 0) throw parity_error("n*d must be even");
    low_degree = d_ < 3;
  }

  long long half_edges() const { return static_cast<long long>(n) * d; }
  long long edges() const { return half_edges() / 2; }

  // Kesten-Stigum threshold for this degree.
  double beta_ks() const;
};

}  // namespace rrg
