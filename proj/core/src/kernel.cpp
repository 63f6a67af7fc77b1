#include "reloc/kernel.hpp"

#include <cmath>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"

namespace reloc {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::Mu1 ? "Mu1" : "Mu2";
}

std::string to_string(Regime regime) { return regime == Regime::A1a ? "A1a" : "A1b"; }

MemoryKernelSpec MemoryKernelSpec::mu1(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("A1", "Mu1 requires alpha > 0 (got " + std::to_string(alpha) + ")");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ConfigError("A1", "Mu1 requires beta >= 0 (got " + std::to_string(beta) + ")");
  }
  return MemoryKernelSpec(KernelFamily::Mu1, alpha, beta);
}

MemoryKernelSpec MemoryKernelSpec::mu2(double gamma, double delta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("A1", "Mu2 requires gamma > 0 (got " + std::to_string(gamma) + ")");
  }
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw ConfigError("A1", "Mu2 requires 0 < delta <= 1/2 (got " + std::to_string(delta) + ")");
  }
  return MemoryKernelSpec(KernelFamily::Mu2, gamma, delta);
}

Regime MemoryKernelSpec::regime() const {
  if (family_ == KernelFamily::Mu2) return Regime::A1a;
  return (p1_ != 0.0 && p0_ >= 1.0) ? Regime::A1a : Regime::A1b;
}

double MemoryKernelSpec::scgf_multiplier() const {
  if (family_ == KernelFamily::Mu1 && p1_ != 0.0) return p1_;
  return 1.0;
}

double MemoryKernelSpec::scale_floor() const {
  if (family_ == KernelFamily::Mu2) return 0.0;
  return p1_ != 0.0 ? 1.0 : std::exp(1.0);
}

double log_eval(const MemoryKernelSpec& kernel, double x) {
  if (!(x >= 0.0)) throw DomainError("kernel eval: x must be >= 0");
  if (kernel.family() == KernelFamily::Mu1) {
    const double alpha = kernel.alpha();
    if (x == 0.0 && alpha < 1.0) throw DomainError("kernel eval: Mu1 with alpha < 1 is singular at 0");
    const double ell = std::log1p(x);
    double out = std::log(alpha) - ell + kernel.beta() * std::pow(ell, alpha);
    if (alpha != 1.0) out += (alpha - 1.0) * std::log(ell);
    return out;
  }
  const double delta = kernel.delta();
  if (x == 0.0) throw DomainError("kernel eval: Mu2 is singular at 0");
  return std::log(kernel.gamma() * delta) + (delta - 1.0) * std::log(x) +
         kernel.gamma() * std::pow(x, delta);
}

double eval(const MemoryKernelSpec& kernel, double x) { return std::exp(log_eval(kernel, x)); }

double log_cumulative(const MemoryKernelSpec& kernel, double x) {
  if (!(x >= 0.0)) throw DomainError("log_cumulative: x must be >= 0");
  if (x == 0.0) return kNegInf;
  if (kernel.family() == KernelFamily::Mu1) {
    const double ell = std::log1p(x);
    if (kernel.beta() == 0.0) return kernel.alpha() * std::log(ell);
    const double y = kernel.beta() * std::pow(ell, kernel.alpha());
    return log_expm1(y) - std::log(kernel.beta());
  }
  return log_expm1(kernel.gamma() * std::pow(x, kernel.delta()));
}

double inverse_cumulative(const MemoryKernelSpec& kernel, double log_v) {
  if (std::isnan(log_v) || log_v == kInf) {
    throw DomainError("inverse_cumulative: log level must be finite or -inf");
  }
  if (log_v == kNegInf) return 0.0;
  if (kernel.family() == KernelFamily::Mu1) {
    double ell;
    if (kernel.beta() == 0.0) {
      ell = std::exp(log_v / kernel.alpha());
    } else {
      const double y = softplus(log_v + std::log(kernel.beta())) / kernel.beta();
      ell = std::pow(y, 1.0 / kernel.alpha());
    }
    return std::expm1(ell);
  }
  const double y = softplus(log_v) / kernel.gamma();
  return std::pow(y, 1.0 / kernel.delta());
}

double log_mass(const MemoryKernelSpec& kernel, double a, double b) {
  if (!(a >= 0.0) || !(b > a)) throw DomainError("log_mass: need 0 <= a < b");
  if (a == 0.0) return log_cumulative(kernel, b);
  // Differences of the exponent are formed directly; subtracting two log M
  // values loses everything once log M is large and b - a is small.
  if (kernel.family() == KernelFamily::Mu2) {
    const double delta = kernel.delta();
    const double y_b = kernel.gamma() * std::pow(b, delta);
    const double dy = kernel.gamma() * std::pow(a, delta) * std::expm1(delta * std::log1p((b - a) / a));
    return y_b + std::log(-std::expm1(-dy));
  }
  const double alpha = kernel.alpha();
  const double ell_a = std::log1p(a);
  const double ell_b = std::log1p(b);
  // ell_b^alpha - ell_a^alpha = ell_a^alpha * expm1(alpha log1p(d_ell / ell_a))
  const double growth = std::expm1(alpha * std::log1p(std::log1p((b - a) / (1.0 + a)) / ell_a));
  if (kernel.beta() == 0.0) return alpha * std::log(ell_a) + std::log(growth);
  const double beta = kernel.beta();
  const double y_b = beta * std::pow(ell_b, alpha);
  const double dy = beta * std::pow(ell_a, alpha) * growth;
  return y_b + std::log(-std::expm1(-dy)) - std::log(beta);
}

double scale_s(const MemoryKernelSpec& kernel, double t) {
  if (!(t > kernel.scale_floor())) {
    throw DomainError("scale_s: t must exceed " + std::to_string(kernel.scale_floor()) +
                      " for this kernel (got " + std::to_string(t) + ")");
  }
  if (kernel.family() == KernelFamily::Mu2) return kernel.gamma() * std::pow(t, kernel.delta());
  if (kernel.beta() != 0.0) return std::pow(std::log(t), kernel.alpha());
  return kernel.alpha() * std::log(std::log(t));
}

}  // namespace reloc
