#include "reloc/runlength.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"

namespace reloc {

std::string to_string(RunLengthFamily family) {
  switch (family) {
    case RunLengthFamily::Deterministic:
      return "Deterministic";
    case RunLengthFamily::UniformInterval:
      return "UniformInterval";
    case RunLengthFamily::StretchedExpTail:
      return "StretchedExpTail";
  }
  return "?";
}

RunLengthSpec RunLengthSpec::deterministic(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("A2", "Deterministic run-length must be > 0 (phi has no atom at 0)");
  }
  return RunLengthSpec(RunLengthFamily::Deterministic, c, 0.0, c);
}

RunLengthSpec RunLengthSpec::uniform_interval(double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
    throw ConfigError("A2", "UniformInterval requires 0 <= a < b < inf");
  }
  return RunLengthSpec(RunLengthFamily::UniformInterval, a, b, 0.5 * (a + b));
}

RunLengthSpec RunLengthSpec::stretched_exp_tail(double kappa, double lambda_scale) {
  if (!(kappa > 1.0) || !std::isfinite(kappa)) {
    throw ConfigError("A2", "StretchedExpTail requires kappa > 1 for an entire moment "
                            "generating function");
  }
  if (!(lambda_scale > 0.0) || !std::isfinite(lambda_scale)) {
    throw ConfigError("A2", "StretchedExpTail requires lambda > 0");
  }
  return RunLengthSpec(RunLengthFamily::StretchedExpTail, kappa, lambda_scale,
                       lambda_scale * std::tgamma(1.0 + 1.0 / kappa));
}

RunLengthFamily RunLengthSpec::family_from_name(const std::string& name) {
  if (name == "Deterministic") return RunLengthFamily::Deterministic;
  if (name == "UniformInterval") return RunLengthFamily::UniformInterval;
  if (name == "StretchedExpTail") return RunLengthFamily::StretchedExpTail;
  if (name == "Geometric" || name == "Exponential") {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    throw ConfigError("A2", lower + " run-lengths excluded: their moment generating "
                                    "function is infinite for large xi");
  }
  throw ConfigError("", "unknown run-length family '" + name + "'");
}

double RunLengthSpec::second_moment() const {
  switch (family_) {
    case RunLengthFamily::Deterministic:
      return p0_ * p0_;
    case RunLengthFamily::UniformInterval:
      return (p0_ * p0_ + p0_ * p1_ + p1_ * p1_) / 3.0;
    case RunLengthFamily::StretchedExpTail:
      return p1_ * p1_ * std::tgamma(1.0 + 2.0 / p0_);
  }
  return 0.0;
}

bool RunLengthSpec::is_integer_valued() const {
  return family_ == RunLengthFamily::Deterministic && p0_ == std::floor(p0_);
}

double sample(const RunLengthSpec& dist, Stream& rng) {
  switch (dist.family()) {
    case RunLengthFamily::Deterministic:
      return dist.c();
    case RunLengthFamily::UniformInterval:
      return dist.a() + (dist.b() - dist.a()) * rng.uniform();
    case RunLengthFamily::StretchedExpTail:
      return dist.lambda_scale() * std::pow(-std::log(rng.uniform()), 1.0 / dist.kappa());
  }
  return 0.0;
}

namespace {

// E[e^{xi L} - 1 - xi L] = int_0^inf xi (e^{xi x} - 1) P(L > x) dx.
double stretched_numerator(const RunLengthSpec& dist, double xi) {
  const double kappa = dist.kappa();
  const double scale = dist.lambda_scale();
  auto log_integrand = [&](double x) {
    const double e = std::expm1(xi * x);
    return std::log(std::abs(xi * e)) - std::pow(x / scale, kappa);
  };

  // Walk a grid past the peak until the integrand has fallen 1e-16 below it.
  const double step = scale / 64.0;
  double peak = kNegInf;
  double upper = step;
  for (int j = 1;; ++j) {
    const double x = j * step;
    const double h = log_integrand(x);
    peak = std::max(peak, h);
    upper = x;
    if (h < peak + std::log(1e-16) && h < log_integrand(x - step)) break;
    if (j > 50'000'000) throw NumericError("lambda: tail truncation point not found");
  }

  auto integrand = [&](double x) {
    return xi * std::expm1(xi * x) * std::exp(-std::pow(x / scale, kappa));
  };
  const int pieces = 16;
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double lo = upper * k / pieces;
    const double hi = upper * (k + 1) / pieces;
    total += integrate(integrand, lo, hi, 1e-10, "lambda(StretchedExpTail)").value;
  }
  return total;
}

}  // namespace

double lambda(const RunLengthSpec& dist, double xi) {
  if (xi == 0.0) return 0.0;
  const double m = dist.mean();
  switch (dist.family()) {
    case RunLengthFamily::Deterministic: {
      const double z = xi * dist.c();
      return expm1_minus_x(z) / z;
    }
    case RunLengthFamily::UniformInterval: {
      const double a = dist.a();
      const double b = dist.b();
      const double numer =
          (expm1_minus_x_quad(xi * b) - expm1_minus_x_quad(xi * a)) / (xi * (b - a));
      return numer / (xi * m);
    }
    case RunLengthFamily::StretchedExpTail:
      return stretched_numerator(dist, xi) / (xi * m);
  }
  return 0.0;
}

}  // namespace reloc
