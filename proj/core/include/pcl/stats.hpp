#pragma once

#include <span>
#include <vector>

namespace pcl {

struct SampleSummary {
  long count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double kurtosis = 0.0;  // m4 / m2^2 (3 for a Gaussian)
  double mean_se = 0.0;
  double variance_se = 0.0;
  double third_moment = 0.0;     // central
  double third_moment_se = 0.0;
  double fourth_moment = 0.0;    // central
};

SampleSummary describe_sample(std::span<const double> x);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and its standard error.
MeanEstimate mean_with_se(std::span<const double> x);

// Sample covariance of paired data and its standard error (delta method on
// the centred products).
MeanEstimate covariance_with_se(std::span<const double> x, std::span<const double> y);

// Lag-1 autocorrelation; its null standard error is 1/sqrt(count).
double lag1_autocorrelation(std::span<const double> x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test against N(mean, sd^2) with the
// asymptotic Kolmogorov distribution (Stephens' finite-sample correction).
KsResult ks_test_normal(std::span<const double> x, double mean = 0.0, double sd = 1.0);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

}  // namespace pcl
