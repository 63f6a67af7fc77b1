#include "reloc/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "reloc/errors.hpp"

namespace reloc {

RateFunction::RateFunction(const RunLengthSpec& dist, const MarkovModel& model, double multiplier)
    : lambda_([dist](double xi) { return reloc::lambda(dist, xi); }),
      lambda_z_([model](std::span<const double> z) { return reloc::lambda_Z(model, z); }),
      dimension_(model.dimension()),
      radial_ok_(model.family() == MarkovFamily::BrownianMotion ||
                 (model.dimension() == 1 && model.step_law().symmetric())),
      multiplier_(multiplier) {}

RateFunction::RateFunction(ScalarFn lambda, VectorFn lambda_z, int dimension, bool radial_ok,
                           double multiplier)
    : lambda_(std::move(lambda)),
      lambda_z_(std::move(lambda_z)),
      dimension_(dimension),
      radial_ok_(radial_ok),
      multiplier_(multiplier) {}

double RateFunction::lambda_X(std::span<const double> zeta) const {
  return lambda(lambda_Z(zeta));
}

double RateFunction::lambda_X_radial(double r) const {
  std::vector<double> zeta(static_cast<std::size_t>(dimension_), 0.0);
  zeta[0] = r;
  return lambda_X(zeta);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct Objective {
  const std::function<double(double)>& F;
  double x;

  double operator()(double t) const {
    const double f = F(t);
    if (std::isnan(f)) throw NumericError("legendre: F returned NaN at t = " + std::to_string(t));
    return x * t - f;
  }
  // g'(t) = x - F'(t), decreasing when F is convex.
  double slope(double t) const {
    const double step = 1e-5 * std::max(1.0, std::abs(t));
    return x - (F(t + step) - F(t - step)) / (2.0 * step);
  }
};

bool below_chord(double ta, double ga, double tb, double gb, double tc, double gc) {
  const double chord = ga + (tb - ta) / (tc - ta) * (gc - ga);
  return gb < chord - 1e-9 * (1.0 + std::abs(chord));
}

}  // namespace

LegendreResult legendre(const std::function<double(double)>& F, double x,
                        const LegendrePolicy& policy) {
  const Objective g{F, x};
  LegendreResult out;

  // Bracket [lo, hi] around a point at least as high as both ends.
  double h = policy.initial_step;
  const double t0 = policy.start;
  const double g0 = g(t0);
  const double gp = g(t0 + h);
  const double gm = g(t0 - h);
  double lo;
  double hi;
  if (gp <= g0 && gm <= g0) {
    lo = t0 - h;
    hi = t0 + h;
    if (below_chord(lo, gm, t0, g0, hi, gp)) out.concave = false;
  } else {
    if (gm > gp) h = -h;
    double a = t0;
    double ga = g0;
    double b = t0 + h;
    double gb = std::max(gp, gm);
    for (;;) {
      h *= 2.0;
      const double c = b + h;
      if (std::abs(c) > policy.max_abs_t) {
        throw NumericError("legendre: x t - F(t) still increasing at |t| = " +
                           std::to_string(std::abs(c)) + ", F is not superlinear");
      }
      const double gc = g(c);
      if (below_chord(a, ga, b, gb, c, gc)) out.concave = false;
      if (gc <= gb) {
        lo = std::min(a, c);
        hi = std::max(a, c);
        break;
      }
      a = b;
      ga = gb;
      b = c;
      gb = gc;
    }
  }

  // Golden section down to a coarse width.
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double g1 = g(x1);
  double g2 = g(x2);
  while (hi - lo > 1e-6 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + kInvPhi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - kInvPhi * (hi - lo);
      g1 = g(x1);
    }
  }
  double best = g1 >= g2 ? x1 : x2;
  double best_value = std::max(g1, g2);

  // Values are flat near the top; the slope sign locates the argmax finer.
  if (g.slope(lo) >= 0.0 && g.slope(hi) <= 0.0) {
    while (hi - lo > policy.argmax_tol * std::max(1.0, std::abs(lo))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (g.slope(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double cand = 0.5 * (lo + hi);
    const double cand_value = g(cand);
    if (cand_value >= best_value - 1e-14 * (1.0 + std::abs(best_value))) {
      best = cand;
      best_value = cand_value;
    }
  } else {
    out.concave = false;
  }
  out.argmax = best;
  out.value = best_value;
  return out;
}

LegendreResult rate_radial(const RateFunction& rf, double x) {
  return legendre([&rf](double r) { return rf.lambda_X_radial(r); }, x);
}

double tail_exponent(const RateFunction& rf, double x) {
  if (!(x >= 0.0)) throw DomainError("tail_exponent: x must be >= 0");
  if (!rf.radial_ok()) {
    throw UnsupportedError(
        "tail_exponent: radial reduction needs Brownian motion or a symmetric 1-d walk");
  }
  if (x == 0.0) return 0.0;
  return std::max(0.0, rate_radial(rf, x).value);
}

}  // namespace reloc
