#include "rrg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rrg/errors.hpp"

namespace rrg {

SampleSummary summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw domain_error("summarize: empty sample");
  SampleSummary s;
  s.count = xs.size();
  // Welford
  double m = 0, m2 = 0;
  std::size_t k = 0;
  for (double v : xs) {
    ++k;
    const double dlt = v - m;
    m += dlt / static_cast<double>(k);
    m2 += dlt * (v - m);
  }
  s.mean = m;
  s.variance = s.count > 1 ? std::max(0.0, m2 / static_cast<double>(s.count - 1)) : 0.0;
  s.se = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

KSResult ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw domain_error("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {best, a.size(), b.size()};
}

double poisson_mean_test(const std::vector<long long>& counts, double lambda0) {
  if (!(lambda0 > 0)) throw domain_error("poisson_mean_test: lambda0 must be positive");
  if (counts.empty()) throw domain_error("poisson_mean_test: empty counts");
  long double sum = 0;
  for (long long c : counts) sum += c;
  const double n = static_cast<double>(counts.size());
  const double mean = static_cast<double>(sum / counts.size());
  return (mean - lambda0) / std::sqrt(lambda0 / n);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw dimension_error("correlation: size mismatch");
  const auto sa = summarize(a), sb = summarize(b);
  if (sa.variance == 0 || sb.variance == 0) return 0;
  double c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - sa.mean) * (b[i] - sb.mean);
  c /= static_cast<double>(a.size() - 1);
  return c / std::sqrt(sa.variance * sb.variance);
}

}  // namespace rrg
