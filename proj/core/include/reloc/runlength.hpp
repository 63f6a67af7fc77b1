#pragma once

#include <string>

#include "reloc/rng.hpp"

namespace reloc {

enum class RunLengthFamily { Deterministic, UniformInterval, StretchedExpTail };

std::string to_string(RunLengthFamily family);

/// Run-length law phi. Every admitted family has an entire moment
/// generating function and no atom at 0.
class RunLengthSpec {
 public:
  static RunLengthSpec deterministic(double c);
  static RunLengthSpec uniform_interval(double a, double b);
  /// P(L >= x) = exp(-(x/lambda)^kappa), kappa > 1.
  static RunLengthSpec stretched_exp_tail(double kappa, double lambda_scale);

  /// Resolves a family by name; "Geometric" and "Exponential" are rejected
  /// with an A2 ConfigError, unknown names with a plain ConfigError.
  static RunLengthFamily family_from_name(const std::string& name);

  RunLengthFamily family() const { return family_; }
  double c() const { return p0_; }
  double a() const { return p0_; }
  double b() const { return p1_; }
  double kappa() const { return p0_; }
  double lambda_scale() const { return p1_; }

  double mean() const { return mean_; }
  double second_moment() const;

  /// Deterministic with an integer value; the only law admitted with a
  /// discrete-time Markov model.
  bool is_integer_valued() const;

  bool operator==(const RunLengthSpec&) const = default;

 private:
  RunLengthSpec(RunLengthFamily family, double p0, double p1, double mean)
      : family_(family), p0_(p0), p1_(p1), mean_(mean) {}

  RunLengthFamily family_;
  double p0_;
  double p1_;
  double mean_;
};

/// One draw from phi; always strictly positive.
double sample(const RunLengthSpec& dist, Stream& rng);

/// Lambda(xi) = E[e^{xi L} - 1 - xi L] / (xi E[L]), with Lambda(0) = 0.
/// Closed form for bounded families, truncated adaptive quadrature for the
/// stretched-exponential tail.
double lambda(const RunLengthSpec& dist, double xi);

}  // namespace reloc
