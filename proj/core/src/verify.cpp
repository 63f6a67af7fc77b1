#include "reloc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"
#include "reloc/parallel.hpp"
#include "reloc/sim.hpp"

namespace reloc {

namespace {

void check_increasing(std::span<const double> xs, const char* what) {
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) throw DomainError(std::string(what) + ": ladder must increase");
  }
}

double max_of(std::span<const double> xs) { return *std::max_element(xs.begin(), xs.end()); }

}  // namespace

ScgfReport scgf_slope_check(const ModelSpec& model, std::span<const double> xi_grid,
                            std::span<const double> horizons, std::uint64_t env_seed,
                            unsigned workers) {
  if (horizons.size() < kMinScgfLadder) {
    throw DomainError("scgf_slope_check: ladder too short, need at least " +
                      std::to_string(kMinScgfLadder) + " horizons");
  }
  check_increasing(horizons, "scgf_slope_check");
  model.validate();
  ScgfReport report;
  report.env_seed = env_seed;
  report.regime = model.kernel.regime();
  report.horizons.assign(horizons.begin(), horizons.end());
  for (double t : horizons) report.s_values.push_back(scale_s(model.kernel, t));

  const RunSequence runs =
      RunSequence::build(model.runs, model.kernel, Horizon{max_of(horizons)}, env_seed);
  const double c = model.kernel.scgf_multiplier();
  report.rows.resize(xi_grid.size());
  parallel_for(xi_grid.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      ScgfXiResult& row = report.rows[k];
      row.xi = xi_grid[k];
      row.exact = exact_log_mgf_B_ladder(runs, model.kernel, horizons, row.xi);
      row.lambda_theory = c * lambda(model.runs, row.xi);
      for (std::size_t j = 0; j < horizons.size(); ++j) {
        const double normalised = row.exact[j] / report.s_values[j];
        row.normalised.push_back(normalised);
        row.pointwise_gap.push_back(std::abs(normalised - row.lambda_theory));
      }
      const LinearFit fit = least_squares(report.s_values, row.exact);
      row.slope = fit.slope;
      row.intercept = fit.intercept;
      row.abs_gap = std::abs(row.slope - row.lambda_theory);
      row.rel_gap = row.lambda_theory != 0.0 ? row.abs_gap / std::abs(row.lambda_theory) : 0.0;
    }
  });
  return report;
}

SeedSummary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summarize: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {v.front(), median, v.back()};
}

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

ResidualReport residual_check(const ModelSpec& model, std::span<const double> horizons,
                              std::span<const std::uint64_t> env_seeds,
                              std::size_t dense_points, double threshold) {
  if (horizons.empty()) throw DomainError("residual_check: empty ladder");
  if (env_seeds.empty()) throw DomainError("residual_check: no environment seeds");
  check_increasing(horizons, "residual_check");
  model.validate();
  ResidualReport report;
  report.regime = model.kernel.regime();
  report.report_only = report.regime == Regime::A1b;
  report.threshold = threshold;

  // Ladder points first, then a log-spaced grid over the same range.
  std::vector<double> queries(horizons.begin(), horizons.end());
  const double lo = horizons.front();
  const double hi = horizons.back();
  for (std::size_t k = 0; k < dense_points; ++k) {
    const double w = dense_points > 1 ? static_cast<double>(k) / (dense_points - 1) : 0.0;
    queries.push_back(lo * std::pow(hi / lo, w));
  }
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return queries[a] < queries[b]; });

  std::vector<double> maxima;
  for (std::uint64_t seed : env_seeds) {
    ResidualSeed rs;
    rs.seed = seed;
    rs.ladder.resize(horizons.size());
    std::vector<double> dense(dense_points);
    Stream rng = Stream::derive(seed, StreamTag::Environment, 0);
    double prev_time = 0.0;
    double time = 0.0;
    std::size_t run = 0;
    for (std::size_t q : order) {
      const double t = queries[q];
      while (time <= t) {
        prev_time = time;
        time += sample(model.runs, rng);
        ++run;
      }
      ResidualPoint p;
      p.t = t;
      p.i_of_t = run;
      p.A = t - prev_time;
      p.s = scale_s(model.kernel, t);
      p.ratio = p.A / p.s;
      if (q < horizons.size()) {
        rs.ladder[q] = p;
      } else {
        dense[q - horizons.size()] = p.ratio;
      }
    }
    rs.max_ratio = 0.0;
    for (const auto& p : rs.ladder) rs.max_ratio = std::max(rs.max_ratio, p.ratio);
    if (!dense.empty()) {
      rs.q50 = quantile(dense, 0.5);
      rs.q90 = quantile(dense, 0.9);
    }
    maxima.push_back(rs.max_ratio);
    if (!report.report_only && !(rs.max_ratio < threshold)) report.pass = false;
    report.seeds.push_back(std::move(rs));
  }
  report.max_ratio_summary = summarize(maxima);
  return report;
}

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::Identity:
      return x;
    case Kind::ExpCentered:
      return std::exp(xi * x) / xi - x;
    case Kind::ExpDouble:
      return std::exp(2.0 * xi * x) / (2.0 * xi);
  }
  return 0.0;
}

namespace {

// E[e^{z L}] = 1 + z E[L] (1 + Lambda(z)).
double mgf(const RunLengthSpec& dist, double z) {
  return 1.0 + z * dist.mean() * (1.0 + lambda(dist, z));
}

}  // namespace

double TestFunction::mean(const RunLengthSpec& dist) const {
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::Identity:
      return dist.mean();
    case Kind::ExpCentered:
      return mgf(dist, xi) / xi - dist.mean();
    case Kind::ExpDouble:
      return mgf(dist, 2.0 * xi) / (2.0 * xi);
  }
  return 0.0;
}

std::string TestFunction::name() const {
  switch (kind) {
    case Kind::One:
      return "one";
    case Kind::Identity:
      return "identity";
    case Kind::ExpCentered:
      return "exp_centered";
    case Kind::ExpDouble:
      return "exp_double";
  }
  return "?";
}

TestFunction TestFunction::from_name(const std::string& name, double xi) {
  TestFunction g;
  g.xi = xi;
  if (name == "one") {
    g.kind = Kind::One;
  } else if (name == "identity") {
    g.kind = Kind::Identity;
  } else if (name == "exp_centered") {
    g.kind = Kind::ExpCentered;
  } else if (name == "exp_double") {
    g.kind = Kind::ExpDouble;
  } else {
    throw ConfigError("", "unknown test function '" + name +
                              "' (one, identity, exp_centered, exp_double)");
  }
  if ((g.kind == Kind::ExpCentered || g.kind == Kind::ExpDouble) && xi == 0.0) {
    throw ConfigError("", "exponential test functions need xi != 0");
  }
  return g;
}

std::string to_string(LemmaSum kind) {
  return kind == LemmaSum::LogPower ? "log_power" : "delta_power";
}

LemmaReport lemma_sum_check(const TestFunction& g, LemmaSum kind, double exponent,
                            const RunLengthSpec& dist, std::span<const std::size_t> n_ladder,
                            std::uint64_t env_seed) {
  if (n_ladder.empty()) throw DomainError("lemma_sum_check: empty ladder");
  for (std::size_t k = 0; k < n_ladder.size(); ++k) {
    if (n_ladder[k] < 2 || (k > 0 && n_ladder[k] <= n_ladder[k - 1])) {
      throw DomainError("lemma_sum_check: ladder must increase and start at n >= 2");
    }
  }
  if (kind == LemmaSum::DeltaPower && !(exponent > 0.0 && exponent <= 0.5)) {
    throw DomainError("lemma_sum_check: delta must be in (0, 1/2]");
  }
  LemmaReport report;
  report.kind = kind;
  report.exponent = exponent;
  report.g = g.name();
  const double eg = g.mean(dist);
  const double m = dist.mean();

  Stream rng = Stream::derive(env_seed, StreamTag::Environment, 0);
  double time = 0.0;
  double next_length = sample(dist, rng);
  CompensatedSum sum;
  std::size_t ladder_pos = 0;
  for (std::size_t i = 1; ladder_pos < n_ladder.size(); ++i) {
    time += next_length;  // T_i
    next_length = sample(dist, rng);  // L_{i+1}
    double h;
    if (kind == LemmaSum::LogPower) {
      if (exponent == 0.0) {
        h = 1.0 / time;
      } else if (time > 1.0) {
        h = std::pow(std::log(time), exponent) / time;
      } else {
        h = 0.0;
      }
    } else {
      h = std::pow(time, exponent - 1.0);
    }
    if (h != 0.0) sum.add(g(next_length) * h);
    if (i == n_ladder[ladder_pos]) {
      const double n = static_cast<double>(i);
      LemmaPoint p;
      p.n = i;
      if (kind == LemmaSum::LogPower) {
        p.empirical = sum.value();
        p.predicted = exponent == -1.0
                          ? eg / m * std::log(std::log(n))
                          : eg / ((exponent + 1.0) * m) * std::pow(std::log(n), exponent + 1.0);
      } else {
        p.empirical = exponent * sum.value();
        p.predicted = eg / std::pow(m, 1.0 - exponent) * std::pow(n, exponent);
      }
      p.remainder = p.empirical - p.predicted;
      p.scaled_remainder = p.remainder / std::log(n);
      report.points.push_back(p);
      ++ladder_pos;
    }
  }
  return report;
}

DobrowReport dobrow_gof(const RunSequence& runs, std::size_t target, std::size_t samples,
                        std::uint64_t mc_seed, unsigned workers) {
  DobrowReport report;
  report.target = target;
  report.samples = samples;
  const AncestryLaw product = bernoulli_product_law(runs, target);
  report.tv = total_variation(exact_ancestry_law(runs, target), product);
  report.exact_pass = report.tv < kDobrowTvTolerance;
  if (samples > 0) {
    std::vector<std::uint64_t> masks(samples);
    parallel_for(samples, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        Stream rng = Stream::derive(mc_seed, StreamTag::Replica, r);
        masks[r] = ancestry_direct(runs, target, rng).mask();
      }
    });
    std::vector<std::size_t> counts(product.size(), 0);
    for (std::uint64_t mask : masks) ++counts[mask];
    report.chi2 = chi_square_gof(counts, product);
    report.sampled_pass = report.chi2.p_value > kDobrowChiLevel;
  } else {
    report.sampled_pass = true;
  }
  return report;
}

EquivalenceReport equivalence_ks(const ModelSpec& model, double t, std::size_t samples,
                                 std::uint64_t env_seed, std::uint64_t mc_seed,
                                 unsigned workers, double threshold, double alpha) {
  if (samples < 2) throw DomainError("equivalence_ks: need at least 2 samples per arm");
  model.validate();
  const RunSequence runs = RunSequence::build(model.runs, model.kernel, Horizon{t}, env_seed);
  const Point origin(static_cast<std::size_t>(model.markov.dimension()), 0.0);
  std::vector<double> direct(samples);
  std::vector<double> timechange(samples);
  parallel_for(samples, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Stream a = Stream::derive(mc_seed, StreamTag::Replica, r);
      direct[r] = simulate_direct(runs, model.kernel, model.markov, origin, t, a).X[0];
      Stream b = Stream::derive(mc_seed, StreamTag::ReplicaAlt, r);
      timechange[r] = simulate_timechange(runs, model.kernel, model.markov, origin, t, b)[0];
    }
  });
  EquivalenceReport report;
  report.t = t;
  report.samples = samples;
  const KsResult ks = ks_two_sample(direct, timechange);
  report.statistic = ks.statistic;
  report.p_value = ks.p_value;
  report.critical = ks_critical_value(samples, samples, alpha);
  report.threshold = threshold;
  report.pass = report.statistic < threshold;
  report.mean_direct = mean_var(direct).mean;
  report.mean_timechange = mean_var(timechange).mean;
  return report;
}

TailReport tail_exponent_estimate(const ModelSpec& model, std::span<const double> x_grid,
                                  std::span<const double> horizons, std::size_t samples,
                                  std::uint64_t env_seed, std::uint64_t mc_seed,
                                  unsigned workers, std::size_t min_hits) {
  if (horizons.empty() || x_grid.empty()) throw DomainError("tail_exponent_estimate: empty grid");
  if (samples == 0) throw DomainError("tail_exponent_estimate: need samples");
  check_increasing(horizons, "tail_exponent_estimate");
  for (double x : x_grid) {
    if (!(x >= 0.0)) throw DomainError("tail_exponent_estimate: x must be >= 0");
  }
  model.validate();
  const RateFunction rf = model.rate_function();
  TailReport report;
  report.x_grid.assign(x_grid.begin(), x_grid.end());
  report.horizons.assign(horizons.begin(), horizons.end());
  report.env_seed = env_seed;
  report.mc_seed = mc_seed;
  report.min_hits = min_hits;
  report.cells.resize(x_grid.size() * horizons.size());

  std::vector<double> theory;
  for (double x : x_grid) theory.push_back(-tail_exponent(rf, x));

  const RunSequence runs =
      RunSequence::build(model.runs, model.kernel, Horizon{max_of(horizons)}, env_seed);
  const Point origin(static_cast<std::size_t>(model.markov.dimension()), 0.0);
  for (std::size_t it = 0; it < horizons.size(); ++it) {
    const double t = horizons[it];
    const double s = scale_s(model.kernel, t);
    const std::uint64_t arm_seed = splitmix64(mc_seed + it);
    std::vector<std::vector<std::size_t>> slice_hits;
    const unsigned slices = std::max(1u, workers);
    slice_hits.assign(slices, std::vector<std::size_t>(x_grid.size(), 0));
    // Hit counts are integers, so the per-slice sums do not depend on the split.
    parallel_for(slices, slices, [&](std::size_t wb, std::size_t we) {
      for (std::size_t w = wb; w < we; ++w) {
        const std::size_t begin = samples * w / slices;
        const std::size_t end = samples * (w + 1) / slices;
        auto& hits = slice_hits[w];
        for (std::size_t r = begin; r < end; ++r) {
          Stream rng = Stream::derive(arm_seed, StreamTag::Replica, r);
          const Point X = simulate_timechange(runs, model.kernel, model.markov, origin, t, rng);
          double norm2 = 0.0;
          for (double v : X) norm2 += v * v;
          const double norm = std::sqrt(norm2);
          for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
            // A lattice point exactly at x s(t) is a hit even when s(t) is off by an ulp.
            if (norm >= x_grid[ix] * s * (1.0 - 1e-12)) ++hits[ix];
          }
        }
      }
    });
    for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
      TailCell& cell = report.cells[ix * horizons.size() + it];
      cell.x = x_grid[ix];
      cell.t = t;
      cell.s = s;
      cell.samples = samples;
      for (const auto& hits : slice_hits) cell.hits += hits[ix];
      cell.p_hat = static_cast<double>(cell.hits) / static_cast<double>(samples);
      cell.p_ci = wilson_interval(cell.hits, samples);
      cell.theory = theory[ix];
      cell.resolved = cell.hits >= min_hits;
      if (cell.resolved) {
        cell.exponent = std::log(cell.p_hat) / s;
        cell.exponent_lo = std::log(cell.p_ci.lower) / s;
        cell.exponent_hi = std::log(cell.p_ci.upper) / s;
        cell.abs_gap = std::abs(cell.exponent - cell.theory);
      }
    }
  }
  return report;
}

double tail_point_for_exponent(const RateFunction& rf, double target) {
  if (!(target >= 0.0)) throw DomainError("tail_point_for_exponent: target must be >= 0");
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (tail_exponent(rf, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("tail_point_for_exponent: target not reached");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-13 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (tail_exponent(rf, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace reloc
