#pragma once

#include <string>

namespace reloc {

enum class KernelFamily { Mu1, Mu2 };

/// Steep (almost-sure) vs flat (in-probability) kernel regimes.
enum class Regime { A1a, A1b };

std::string to_string(KernelFamily family);
std::string to_string(Regime regime);

/// Memory kernel family with validated parameters.
///
/// Mu1(alpha, beta): (alpha/(x+1)) (log(1+x))^(alpha-1) exp(beta (log(1+x))^alpha).
/// The x -> x+1 shift is applied for every parameter set, which keeps the
/// kernel integrable at 0 and real for non-integer alpha.
///
/// Mu2(gamma, delta): gamma delta x^(delta-1) exp(gamma x^delta), 0 < delta <= 1/2.
class MemoryKernelSpec {
 public:
  static MemoryKernelSpec mu1(double alpha, double beta);
  static MemoryKernelSpec mu2(double gamma, double delta);

  KernelFamily family() const { return family_; }
  double alpha() const { return p0_; }
  double beta() const { return p1_; }
  double gamma() const { return p0_; }
  double delta() const { return p1_; }

  Regime regime() const;

  /// True for Mu1(1, 1): constant kernel, M(x) = x.
  bool is_uniform() const { return family_ == KernelFamily::Mu1 && p0_ == 1.0 && p1_ == 1.0; }

  /// Factor c such that log M(t) ~ c * s(t). It is beta for Mu1 with
  /// beta != 0 (M1 = (e^{beta (log t)^alpha} - 1)/beta while s = (log t)^alpha)
  /// and 1 otherwise. Quenched SCGFs normalised by s(t) converge to c * Lambda.
  double scgf_multiplier() const;

  /// Smallest t for which scale_s is defined (exclusive).
  double scale_floor() const;

  bool operator==(const MemoryKernelSpec&) const = default;

 private:
  MemoryKernelSpec(KernelFamily family, double p0, double p1)
      : family_(family), p0_(p0), p1_(p1) {}

  KernelFamily family_;
  double p0_;
  double p1_;
};

/// Kernel density mu(x). Throws DomainError for x < 0 or where the kernel
/// is singular at 0 (Mu2, and Mu1 with alpha < 1).
double eval(const MemoryKernelSpec& kernel, double x);

/// log mu(x), finite wherever eval is positive.
double log_eval(const MemoryKernelSpec& kernel, double x);

/// log M(x) with M(x) = int_0^x mu. Returns -inf at x = 0 and never overflows.
double log_cumulative(const MemoryKernelSpec& kernel, double x);

/// Closed-form inverse of log_cumulative: x with log M(x) = log_v.
/// log_v = -inf maps to 0; +inf or NaN throws DomainError.
double inverse_cumulative(const MemoryKernelSpec& kernel, double log_v);

/// log(M(b) - M(a)) for 0 <= a < b.
double log_mass(const MemoryKernelSpec& kernel, double a, double b);

/// Speed of the large deviations: (log t)^alpha, alpha log log t, or gamma t^delta.
double scale_s(const MemoryKernelSpec& kernel, double t);

}  // namespace reloc
