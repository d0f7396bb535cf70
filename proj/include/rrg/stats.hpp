#pragma once

#include <cstddef>
#include <vector>

namespace rrg {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0;
  double variance = 0;  // unbiased; 0 for a single sample
  double se = 0;        // sqrt(variance / count)
};

SampleSummary summarize(const std::vector<double>& xs);

struct KSResult {
  double statistic = 0;
  std::size_t n1 = 0, n2 = 0;
};

// Two-sample Kolmogorov-Smirnov statistic, exact sup over the merged sample.
KSResult ks_distance(std::vector<double> a, std::vector<double> b);

// (mean - lambda0) / sqrt(lambda0 / count).
double poisson_mean_test(const std::vector<long long>& counts, double lambda0);

// Pearson correlation; 0 when either sample is constant.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rrg
