#include "reloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"

namespace reloc {

ResidualTime residual_A(const RunSequence& runs, double t) {
  const std::size_t i = runs.run_containing(t);
  return {i, t - runs.time(i - 1)};
}

double sample_F(const RunSequence& runs, const MemoryKernelSpec& kernel, std::size_t i,
                Stream& rng) {
  if (i < 1 || i > runs.count()) {
    throw CapacityError("sample_F: run " + std::to_string(i) + " not built");
  }
  const double length = runs.length(i);
  const double u = rng.uniform();
  if (kernel.is_uniform()) return u * length;
  const double level = logaddexp(runs.log_prefix(i - 1), std::log(u) + runs.log_weight(i));
  const double x = inverse_cumulative(kernel, level) - runs.time(i - 1);
  return std::clamp(x, 0.0, length);
}

namespace {

// Subset sums of run lengths can exceed T_{i-1} by a few ulps.
double clamp_B(const RunSequence& runs, std::size_t i, double B) {
  return std::min(B, runs.time(i - 1));
}

}  // namespace

TimeChangeSample sample_S(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                          Stream& rng, AncestrySampler sampler, bool keep_draws) {
  const ResidualTime r = residual_A(runs, t);
  TimeChangeSample out;
  out.i_of_t = r.i_of_t;
  out.A = r.A;
  double B = 0.0;
  auto visit = [&](std::size_t k) {
    const double f = sample_F(runs, kernel, k, rng);
    B += f;
    if (keep_draws) {
      out.ancestors.push_back(k);
      out.F_draws.push_back(f);
    }
  };
  if (r.i_of_t >= 2) {
    if (sampler == AncestrySampler::Bernoulli) {
      const AncestryVector anc = ancestry_dobrow(runs, r.i_of_t, rng);
      for (std::size_t k : anc.chain) visit(k);
    } else {
      std::size_t j = r.i_of_t;
      while (j > 1) {
        j = draw_weighted_index(runs, j - 1, rng);
        visit(j);
      }
    }
  }
  out.B = clamp_B(runs, r.i_of_t, B);
  out.S = out.A + out.B;
  return out;
}

double sample_S_value(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                      Stream& rng) {
  const ResidualTime r = residual_A(runs, t);
  double B = 0.0;
  std::size_t j = r.i_of_t;
  while (j > 1) {
    j = draw_weighted_index(runs, j - 1, rng);
    B += sample_F(runs, kernel, j, rng);
  }
  return r.A + clamp_B(runs, r.i_of_t, B);
}

namespace {

// Lazily sampled path of one run, started at `start` with clock `clock0`.
struct RunPath {
  double clock0 = 0.0;
  std::vector<double> offsets;  // Brownian: sorted query offsets, offsets[0] = 0
  std::vector<Point> values;    // Brownian: values at offsets; lattice: value after k jumps
};

class DirectPaths {
 public:
  DirectPaths(const MarkovModel& model, Stream& rng) : model_(model), rng_(rng) {}

  void open(Point start, double clock0) {
    RunPath path;
    path.clock0 = clock0;
    if (model_.family() == MarkovFamily::BrownianMotion) path.offsets.push_back(0.0);
    path.values.push_back(std::move(start));
    paths_.push_back(std::move(path));
  }

  double clock(std::size_t run) const { return paths_[run - 1].clock0; }

  Point query(std::size_t run, double offset) {
    RunPath& path = paths_[run - 1];
    if (model_.family() == MarkovFamily::LatticeWalk) return query_lattice(path, offset);
    return query_brownian(path, offset);
  }

 private:
  Point query_lattice(RunPath& path, double offset) {
    const auto jumps = static_cast<std::size_t>(jumps_between(path.clock0, path.clock0 + offset));
    while (path.values.size() <= jumps) {
      Point next = path.values.back();
      step_inplace(model_, next, rng_);
      path.values.push_back(std::move(next));
    }
    return path.values[jumps];
  }

  Point query_brownian(RunPath& path, double offset) {
    auto it = std::lower_bound(path.offsets.begin(), path.offsets.end(), offset);
    const auto pos = static_cast<std::size_t>(it - path.offsets.begin());
    if (it != path.offsets.end() && *it == offset) return path.values[pos];
    Point value;
    if (it == path.offsets.end()) {
      value = path.values.back();
      std::normal_distribution<double> normal(0.0, std::sqrt(offset - path.offsets.back()));
      for (double& v : value) v += normal(rng_);
    } else {
      // Brownian bridge between the neighbouring sampled offsets.
      const double lo = path.offsets[pos - 1];
      const double hi = path.offsets[pos];
      const double w = (offset - lo) / (hi - lo);
      const double sd = std::sqrt((offset - lo) * (hi - offset) / (hi - lo));
      std::normal_distribution<double> normal(0.0, sd);
      const Point& a = path.values[pos - 1];
      const Point& b = path.values[pos];
      value.resize(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        value[k] = a[k] + w * (b[k] - a[k]) + normal(rng_);
      }
    }
    path.offsets.insert(path.offsets.begin() + static_cast<std::ptrdiff_t>(pos), offset);
    path.values.insert(path.values.begin() + static_cast<std::ptrdiff_t>(pos), value);
    return value;
  }

  const MarkovModel& model_;
  Stream& rng_;
  std::vector<RunPath> paths_;
};

void check_start(const MarkovModel& model, std::span<const double> start) {
  if (start.size() != static_cast<std::size_t>(model.dimension())) {
    throw DomainError("simulate: start point has the wrong dimension");
  }
}

}  // namespace

DirectResult simulate_direct(const RunSequence& runs, const MemoryKernelSpec& kernel,
                             const MarkovModel& model, std::span<const double> start, double t,
                             Stream& rng, bool keep_trace) {
  check_start(model, start);
  const ResidualTime r = residual_A(runs, t);
  DirectPaths paths(model, rng);
  paths.open(Point(start.begin(), start.end()), 0.0);
  DirectResult out;
  const auto times = runs.times();
  for (std::size_t n = 1; n < r.i_of_t; ++n) {
    double R;
    if (kernel.is_uniform()) {
      R = rng.uniform() * runs.time(n);
    } else {
      R = inverse_cumulative(kernel, std::log(rng.uniform()) + runs.log_prefix(n));
    }
    auto it = std::upper_bound(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(n) + 1, R);
    std::size_t j = static_cast<std::size_t>(it - times.begin());
    j = std::clamp<std::size_t>(j, 1, n);
    const double offset = std::clamp(R - runs.time(j - 1), 0.0, runs.length(j));
    Point V = paths.query(j, offset);
    if (keep_trace) out.trace.records.push_back({n, R, j, V});
    paths.open(std::move(V), paths.clock(j) + offset);
  }
  out.X = paths.query(r.i_of_t, r.A);
  if (keep_trace) out.trace.endpoint = out.X;
  return out;
}

Point simulate_timechange(const RunSequence& runs, const MemoryKernelSpec& kernel,
                          const MarkovModel& model, std::span<const double> start, double t,
                          Stream& rng) {
  check_start(model, start);
  const double S = sample_S_value(runs, kernel, t, rng);
  const double duration =
      model.family() == MarkovFamily::LatticeWalk ? std::floor(S) : S;
  return evolve(model, start, duration, rng);
}

double mgf_F_minus_one(const RunSequence& runs, const MemoryKernelSpec& kernel, std::size_t i,
                       double xi) {
  if (i < 1 || i > runs.count()) {
    throw CapacityError("mgf_F: run " + std::to_string(i) + " not built");
  }
  if (xi == 0.0) return 0.0;
  const double length = runs.length(i);
  if (kernel.is_uniform()) {
    const double z = xi * length;
    return expm1_minus_x(z) / z;
  }
  const double start = runs.time(i - 1);
  if (start == 0.0) {
    // First run: the kernel may be singular at 0, integrate over the quantile.
    // The quantile map itself can have an infinite slope at 0 (Mu1, alpha > 1).
    const double log_total = runs.log_prefix(i);
    auto f = [&](double v) {
      return std::expm1(xi * inverse_cumulative(kernel, std::log(v) + log_total));
    };
    return integrate_endpoints(f, 0.0, 1.0, 1e-10, "mgf_F(first run)").value;
  }
  const double log_mu0 = log_eval(kernel, start);
  auto density = [&](double x) { return std::exp(log_eval(kernel, start + x) - log_mu0); };
  auto weighted = [&](double x) { return std::expm1(xi * x) * density(x); };
  const double numer = integrate(weighted, 0.0, length, 1e-10, "mgf_F numerator").value;
  const double denom = integrate(density, 0.0, length, 1e-10, "mgf_F denominator").value;
  return numer / denom;
}

namespace {

double log_term(const RunSequence& runs, const MemoryKernelSpec& kernel, std::size_t k,
                double xi) {
  return std::log1p(runs.ratio(k) * mgf_F_minus_one(runs, kernel, k, xi));
}

}  // namespace

double exact_log_mgf_B(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                       double xi) {
  const std::size_t i = residual_A(runs, t).i_of_t;
  if (xi == 0.0) return 0.0;
  CompensatedSum sum;
  for (std::size_t k = 1; k < i; ++k) sum.add(log_term(runs, kernel, k, xi));
  return sum.value();
}

std::vector<double> exact_log_mgf_B_ladder(const RunSequence& runs,
                                           const MemoryKernelSpec& kernel,
                                           std::span<const double> horizons, double xi) {
  std::vector<double> out;
  out.reserve(horizons.size());
  CompensatedSum sum;
  std::size_t k = 1;
  double previous = -1.0;
  for (double t : horizons) {
    if (!(t > previous)) throw DomainError("exact_log_mgf_B_ladder: horizons must increase");
    previous = t;
    const std::size_t i = residual_A(runs, t).i_of_t;
    if (xi != 0.0) {
      for (; k < i; ++k) sum.add(log_term(runs, kernel, k, xi));
    }
    out.push_back(xi == 0.0 ? 0.0 : sum.value());
  }
  return out;
}

}  // namespace reloc
