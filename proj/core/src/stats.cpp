#include "pcl/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "pcl/errors.hpp"

namespace pcl {

SampleSummary describe_sample(std::span<const double> x) {
  require(x.size() >= 2, "need at least two samples");
  SampleSummary s;
  s.count = static_cast<long>(x.size());
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0, m6 = 0;
  for (double v : x) {
    const double c = v - mean, c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
    m6 += c2 * c2 * c2;
  }
  m2 /= n; m3 /= n; m4 /= n; m6 /= n;
  s.mean = mean;
  s.variance = m2 * n / (n - 1.0);
  s.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  s.mean_se = std::sqrt(s.variance / n);
  s.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  s.third_moment = m3;
  s.third_moment_se = std::sqrt(std::max(0.0, m6 - m3 * m3) / n);
  s.fourth_moment = m4;
  return s;
}

MeanEstimate mean_with_se(std::span<const double> x) {
  require(x.size() >= 2, "need at least two samples");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MeanEstimate covariance_with_se(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "covariance needs paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= n; my /= n;
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  auto est = mean_with_se(prod);
  est.mean *= n / (n - 1.0);
  return est;
}

double lag1_autocorrelation(std::span<const double> x) {
  require(x.size() >= 3, "autocorrelation needs at least three samples");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i + 1 < x.size()) num += (x[i] - mean) * (x[i + 1] - mean);
  }
  return den > 0 ? num / den : 0.0;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> x, double mean, double sd) {
  require(x.size() >= 2, "KS test needs at least two samples");
  require(sd > 0.0, "KS reference standard deviation must be > 0");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const boost::math::normal_distribution<double> ref(mean, sd);
  const double n = static_cast<double>(v.size());
  double D = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = boost::math::cdf(ref, v[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  const double rn = std::sqrt(n);
  return {D, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * D)};
}

}  // namespace pcl
