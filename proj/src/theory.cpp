#include "rrg/theory.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rrg/errors.hpp"

namespace rrg {

double beta_ks(int d) {
  if (d <= 2) throw domain_error("beta_KS needs d >= 3");
  const double s = std::sqrt(d - 1.0);
  return std::log((s + 1) / (s - 1));
}

double ModelParams::beta_ks() const { return rrg::beta_ks(d); }

namespace {

double lambda_i(int d, int i) { return std::pow(d - 1.0, i) / (2.0 * i); }
double delta1(double beta) { return -std::tanh(beta / 2); }

bool below_ks(const ModelParams& p) { return p.d >= 3 && p.beta < beta_ks(p.d); }

}  // namespace

CycleLawParams cycle_law_params(const ModelParams& p, int imax) {
  if (imax < 3) throw domain_error("imax must be >= 3");
  CycleLawParams c{p.d, p.beta, imax, std::vector<double>(imax + 1, 0), std::vector<double>(imax + 1, 0)};
  const double x = p.x;
  const double d1 = (x - 1) / (x + 1);
  for (int i = 1; i <= imax; ++i) {
    c.lambda[i] = lambda_i(p.d, i);
    c.delta[i] = std::pow(d1, i);
  }
  // Geometric tails with ratios (d-1)|delta_1| and (d-1) delta_1^2.
  auto tail = [&](double r) -> double {
    if (r >= 1) return INFINITY;
    double s = 0;
    for (int i = imax + 1; i <= imax + 4000; ++i) s += std::pow(r, i) / (2.0 * i);
    return s;
  };
  c.tail_mean = tail((p.d - 1) * std::abs(d1));
  c.tail_second = tail((p.d - 1) * d1 * d1);
  return c;
}

MomentAsymptotics first_moment_asymptotic(const ModelParams& p) {
  const int d = p.d;
  const double b = p.beta, eb = std::exp(b);
  const double d1 = delta1(b);
  MomentAsymptotics m;
  m.rate = (1 - d / 2.0) * std::log(2.0) + (d / 2.0) * std::log1p(p.x);
  m.log_prefactor = 0.5 * std::log((1 + eb) / (2 + d * eb - d));
  m.correction = -lambda_i(d, 1) * d1 - lambda_i(d, 2) * d1 * d1;
  m.theory_valid = below_ks(p);
  return m;
}

MomentAsymptotics second_moment_asymptotic(const ModelParams& p) {
  const int d = p.d;
  const double b = p.beta, eb = std::exp(b), e2b = std::exp(2 * b);
  const double arg = 2 * e2b + 2 * d * eb - d * e2b - d + 2;
  if (!(arg > 0)) throw domain_error("second-moment prefactor argument not positive: " + std::to_string(arg));
  const double l1 = lambda_i(d, 1), l2 = lambda_i(d, 2);
  MomentAsymptotics m;
  m.rate = (2 - d) * std::log(2.0) + d * std::log1p(p.x);
  m.log_prefactor = 2 * std::log1p(eb) - std::log(d * eb - d + 2) - 0.5 * std::log(arg);
  m.correction = l1 + l2 - 4 * l1 / ((1 + eb) * (1 + eb)) - 4 * l2 * std::pow(1 + e2b, 2) / std::pow(1 + eb, 4);
  m.theory_valid = below_ks(p);
  return m;
}

double moment_ratio_log(const ModelParams& p) {
  const double d1 = delta1(p.beta);
  const double q = (p.d - 1) * d1 * d1;
  if (q >= 1 || (p.d >= 3 && !below_ks(p))) throw domain_error("moment ratio diverges for beta >= beta_KS");
  return -0.5 * std::log1p(-q) - lambda_i(p.d, 1) * d1 * d1 - lambda_i(p.d, 2) * std::pow(d1, 4);
}

double moment_ratio_limit(const ModelParams& p) { return std::exp(moment_ratio_log(p)); }

double moment_ratio_log_series(const ModelParams& p, int imax) {
  const double d1 = delta1(p.beta);
  double s = 0;
  for (int i = 3; i <= imax; ++i) s += lambda_i(p.d, i) * std::pow(d1, 2 * i);
  return s;
}

double simplicity_probability(const ModelParams& p, SimplicityVariant v) {
  const double d = p.d, eb = std::exp(p.beta), e2b = std::exp(2 * p.beta);
  switch (v) {
    case SimplicityVariant::null_model: return std::exp(-(d - 1) / 2 - (d - 1) * (d - 1) / 4);
    case SimplicityVariant::planted1:
      return std::exp(-(d - 1) / (1 + eb) - (d - 1) * (d - 1) * (1 + e2b) / (2 * (1 + eb) * (1 + eb)));
    case SimplicityVariant::planted2:
      return std::exp(-2 * (d - 1) / ((1 + eb) * (1 + eb)) -
                      (d - 1) * (d - 1) * std::pow(1 + e2b, 2) / std::pow(1 + eb, 4));
  }
  return 0;
}

double centering(const ModelParams& p, long long n) {
  const double d = p.d, b = p.beta, eb = std::exp(b);
  const double d1 = delta1(b);
  return 0.5 * std::log((1 + eb) / (2 + d * eb - d)) +
         static_cast<double>(n) * ((1 - d / 2) * std::log(2.0) + (d / 2) * std::log(1 + std::exp(-b))) -
         (d - 1) / 2 * d1 - (d - 1) * (d - 1) / 4 * d1 * d1;
}

int poisson(double mean, Rng& rng) {
  if (mean <= 0) return 0;
  std::poisson_distribution<int> dist(mean);
  return dist(rng);
}

WSample sample_log_w(const CycleLawParams& c, Rng& rng) {
  if (c.imax < 3) throw domain_error("imax must be >= 3");
  WSample w;
  w.cycle_draws.resize(c.imax - 2);
  for (int i = 3; i <= c.imax; ++i) {
    if (c.delta[i] <= -1) throw domain_error("delta_i <= -1: W degenerate");
    int k = poisson(c.lambda[i], rng);
    w.cycle_draws[i - 3] = k;
    w.log_w += k * std::log1p(c.delta[i]) - c.lambda[i] * c.delta[i];
  }
  w.tail_bound_mean = c.tail_mean;
  w.tail_bound_second = c.tail_second;
  return w;
}

}  // namespace rrg
