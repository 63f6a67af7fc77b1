#include "reloc/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <string>

#include "reloc/errors.hpp"

namespace reloc {

namespace {

// Tail of the exponential series starting at z^k / k!.
double exp_series_from(double z, int k) {
  double term = 1.0;
  for (int j = 1; j <= k; ++j) term *= z / j;
  double sum = 0.0;
  for (int j = k; j < 60; ++j) {
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    term *= z / (j + 1);
  }
  return sum;
}

}  // namespace

double expm1_minus_x(double z) {
  if (std::abs(z) < 0.5) return exp_series_from(z, 2);
  return std::expm1(z) - z;
}

double expm1_minus_x_quad(double z) {
  if (std::abs(z) < 1.0) return exp_series_from(z, 3);
  return std::expm1(z) - z - 0.5 * z * z;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  QuadratureResult out;
  if (a == b) return out;
  double l1 = 0.0;
  out.value = gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &out.error, &l1);
  if (!std::isfinite(out.value) || out.error > 10.0 * rel_tol * l1 + 1e-300) {
    throw NumericError(std::string(what) + ": quadrature did not converge on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "], estimate " +
                       std::to_string(out.value) + " +/- " + std::to_string(out.error));
  }
  return out;
}

QuadratureResult integrate_endpoints(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol, const char* what) {
  QuadratureResult out;
  if (a == b) return out;
  // integrate() is non-const here and grows its abscissa tables lazily
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double l1 = 0.0;
  out.value = rule.integrate(f, a, b, rel_tol, &out.error, &l1);
  if (!std::isfinite(out.value) || out.error > 10.0 * rel_tol * l1 + 1e-300) {
    throw NumericError(std::string(what) + ": quadrature did not converge on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "], estimate " +
                       std::to_string(out.value) + " +/- " + std::to_string(out.error));
  }
  return out;
}

}  // namespace reloc
