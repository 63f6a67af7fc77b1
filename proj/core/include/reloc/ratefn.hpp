#pragma once

#include <functional>
#include <span>

#include "reloc/markov.hpp"
#include "reloc/runlength.hpp"

namespace reloc {

/// Lambda_X = c * Lambda o Lambda_Z, the quenched SCGF of X(t) normalised by
/// s(t). The factor c is MemoryKernelSpec::scgf_multiplier() (1 unless
/// the kernel is Mu1 with beta != 0, beta != 1).
class RateFunction {
 public:
  using ScalarFn = std::function<double(double)>;
  using VectorFn = std::function<double(std::span<const double>)>;

  RateFunction(const RunLengthSpec& dist, const MarkovModel& model, double multiplier = 1.0);
  /// Generic composition; `radial_ok` says whether tail exponents may use
  /// the radial reduction.
  RateFunction(ScalarFn lambda, VectorFn lambda_z, int dimension, bool radial_ok,
               double multiplier = 1.0);

  double lambda(double xi) const { return multiplier_ * lambda_(xi); }
  double lambda_Z(std::span<const double> zeta) const { return lambda_z_(zeta); }
  double lambda_X(std::span<const double> zeta) const;
  /// Lambda_X(r e_1).
  double lambda_X_radial(double r) const;

  int dimension() const { return dimension_; }
  bool radial_ok() const { return radial_ok_; }
  double multiplier() const { return multiplier_; }

 private:
  ScalarFn lambda_;
  VectorFn lambda_z_;
  int dimension_;
  bool radial_ok_;
  double multiplier_;
};

struct LegendreResult {
  double value = 0.0;
  double argmax = 0.0;
  bool concave = true;  ///< no concavity violation of t -> x t - F(t) was seen
};

struct LegendrePolicy {
  double start = 0.0;
  double initial_step = 1.0;
  double max_abs_t = 1e12;
  double argmax_tol = 1e-10;
};

/// F*(x) = sup_t { x t - F(t) } by an expanding bracket, golden-section
/// search and a final bisection on a central-difference slope.
/// NumericError when the objective keeps increasing past max_abs_t.
LegendreResult legendre(const std::function<double(double)>& F, double x,
                        const LegendrePolicy& policy = {});

/// inf_{|y| >= x} Lambda_X^*(y) = Lambda_X^*(x e_1) for radially symmetric
/// Lambda_X. UnsupportedError otherwise; DomainError for x < 0.
double tail_exponent(const RateFunction& rf, double x);

/// Lambda_X^*(x e_1) with the maximiser.
LegendreResult rate_radial(const RateFunction& rf, double x);

}  // namespace reloc
