#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reloc {

struct KsResult {
  double statistic = 0.0;  ///< sup |F_a - F_b|
  double p_value = 1.0;    ///< asymptotic Kolmogorov p-value
};

/// Two-sample Kolmogorov-Smirnov; ties are stepped over jointly.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS distance to a continuous CDF.
double ks_one_sample(std::span<const double> sample, double (*cdf)(double, const void*),
                     const void* ctx);

/// Critical value of the two-sample statistic at level `alpha`:
/// sqrt(-log(alpha/2)/2) * sqrt((n+m)/(n m)).
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t cells = 0;  ///< after pooling
};

/// Pearson goodness of fit of `observed` counts against `probs`. Cells with
/// expected count below `min_expected` are pooled into one; zero-probability
/// cells with observations give p = 0.
ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> probs, double min_expected = 5.0);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for k successes out of n.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  std::size_t n = 0;
};

MeanVar mean_var(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace reloc
