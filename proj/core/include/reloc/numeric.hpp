#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace reloc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow; either argument may be -inf.
inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 + e^z).
inline double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

/// log(e^y - 1) for y > 0; -inf at y = 0.
inline double log_expm1(double y) {
  if (y <= 0.0) return kNegInf;
  return y + std::log(-std::expm1(-y));
}

/// e^z - 1 - z with full relative accuracy near zero.
double expm1_minus_x(double z);

/// e^z - 1 - z - z^2/2 with full relative accuracy near zero.
double expm1_minus_x_quad(double z);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod on [a, b]. Throws NumericError when the error
/// estimate does not reach `rel_tol` (with a small slack for the estimator).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, const char* what = "integrate");

/// Tanh-sinh on [a, b]; tolerates integrable singularities and infinite
/// derivatives at the endpoints. Same error contract as integrate.
QuadratureResult integrate_endpoints(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol = 1e-10,
                                     const char* what = "integrate_endpoints");

}  // namespace reloc
