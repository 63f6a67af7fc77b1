#include "reloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "reloc/errors.hpp"

namespace reloc {

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult out;
  out.statistic = d;
  const double en = std::sqrt(n * m / (n + m));
  out.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
  return out;
}

double ks_one_sample(std::span<const double> sample, double (*cdf)(double, const void*),
                     const void* ctx) {
  if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = cdf(x[k], ctx);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size()) throw DomainError("chi_square_gof: size mismatch");
  double total = 0.0;
  for (std::size_t c : observed) total += static_cast<double>(c);
  if (total == 0.0) throw DomainError("chi_square_gof: no observations");
  ChiSquareResult out;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = probs[k] * total;
    const double o = static_cast<double>(observed[k]);
    if (probs[k] == 0.0) {
      if (o > 0.0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
      }
      continue;
    }
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    out.statistic += (o - e) * (o - e) / e;
    ++out.cells;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++out.cells;
  }
  if (out.cells < 2) {
    out.dof = 0.0;
    out.p_value = 1.0;
    return out;
  }
  out.dof = static_cast<double>(out.cells - 1);
  const boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  // the endpoints are exact at k = 0 and k = n; rounding would leave ~1e-18
  const double lower = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lower, upper};
}

MeanVar mean_var(std::span<const double> xs) {
  MeanVar out;
  for (double x : xs) {
    ++out.n;
    const double delta = x - out.mean;
    out.mean += delta / static_cast<double>(out.n);
    out.variance += delta * (x - out.mean);
  }
  out.variance = out.n > 1 ? out.variance / static_cast<double>(out.n - 1) : 0.0;
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace reloc
