#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles/oracles.hpp"
#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"
#include "reloc/runlength.hpp"
#include "reloc/sim.hpp"
#include "reloc/stats.hpp"

namespace reloc {
namespace {

const auto kUniform = MemoryKernelSpec::mu1(1, 1);
const auto kDet1 = RunLengthSpec::deterministic(1);
const Point kOrigin{0.0};

RunSequence unit_runs(std::size_t n) { return RunSequence::build(kDet1, kUniform, RunCount{n}, 1); }

TEST(ResidualA, Examples) {
  const RunSequence runs = unit_runs(10);
  auto r = residual_A(runs, 3.25);
  EXPECT_EQ(r.i_of_t, 4u);
  EXPECT_DOUBLE_EQ(r.A, 0.25);
  r = residual_A(runs, 0.0);
  EXPECT_EQ(r.i_of_t, 1u);
  EXPECT_EQ(r.A, 0.0);
  r = residual_A(runs, 3.0);
  EXPECT_EQ(r.i_of_t, 4u);
  EXPECT_EQ(r.A, 0.0);
  EXPECT_THROW(residual_A(runs, 10.0), CapacityError);
  EXPECT_THROW(residual_A(runs, 1e9), CapacityError);
}

TEST(ResidualA, BoundedByRunLength) {
  const RunSequence runs = RunSequence::build(RunLengthSpec::stretched_exp_tail(2, 1), kUniform, RunCount{500}, 4);
  for (double t = 0; t < runs.time(runs.count()); t += 0.37) {
    const auto r = residual_A(runs, t);
    ASSERT_GE(r.A, 0.0);
    ASSERT_LT(r.A, runs.length(r.i_of_t));
    ASSERT_LE(runs.time(r.i_of_t - 1), t);
    ASSERT_GT(runs.time(r.i_of_t), t);
  }
}

TEST(SampleF, UniformKernelIsScaledUniform) {
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kUniform, RunCount{50}, 2);
  const std::size_t i = 37;
  const double L = runs.length(i);
  Stream rng = Stream::derive(1, StreamTag::Test, 0);
  std::vector<double> f(100'000);
  for (auto& x : f) x = sample_F(runs, kUniform, i, rng);
  auto cdf = [](double x, const void* ctx) {
    const double len = *static_cast<const double*>(ctx);
    return std::clamp(x / len, 0.0, 1.0);
  };
  EXPECT_LT(ks_one_sample(f, cdf, &L), 0.01);
}

TEST(SampleF, SupportForEveryKernel) {
  Stream rng = Stream::derive(2, StreamTag::Test, 0);
  for (auto kernel : {kUniform, MemoryKernelSpec::mu2(1, 0.5), MemoryKernelSpec::mu1(2, 1), MemoryKernelSpec::mu1(0.5, 0),
                      MemoryKernelSpec::mu2(5, 0.5)}) {
    const RunSequence runs = RunSequence::build(RunLengthSpec::stretched_exp_tail(2, 1), kernel, RunCount{3000}, 3);
    for (std::size_t i : {1ul, 2ul, 10ul, 1000ul, 3000ul}) {
      for (int k = 0; k < 2000; ++k) {
        const double F = sample_F(runs, kernel, i, rng);
        ASSERT_GE(F, 0.0);
        ASSERT_LE(F, runs.length(i));
      }
    }
    EXPECT_THROW(sample_F(runs, kernel, 3001, rng), CapacityError);
  }
}

TEST(SampleF, Mu2MedianMatchesQuadratureCdf) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  const RunSequence runs = RunSequence::build(kDet1, kernel, RunCount{101}, 1);
  const std::size_t i = 101;
  ASSERT_EQ(runs.time(i - 1), 100.0);
  // CDF(x) = int_100^{100+x} mu / int_100^101 mu, mu scaled by e^{-10} to stay O(1)
  auto mu = [](double u) { return 0.5 / std::sqrt(u) * std::exp(std::sqrt(u) - 10.0); };
  const double total = oracle::simpson_refined(mu, 100.0, 101.0, 2000);
  double lo = 0;
  double hi = 1;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (oracle::simpson_refined(mu, 100.0, 100.0 + mid, 2000) / total < 0.5 ? lo : hi) = mid;
  }
  const double median_ref = 0.5 * (lo + hi);
  Stream rng = Stream::derive(3, StreamTag::Test, 0);
  std::vector<double> f(100'000);
  for (auto& x : f) x = sample_F(runs, kernel, i, rng);
  std::nth_element(f.begin(), f.begin() + 50'000, f.end());
  EXPECT_NEAR(f[50'000], median_ref, 0.01);
  // the density is tilted to the right end by e^{sqrt(u)}
  EXPECT_GT(median_ref, 0.5);
}

TEST(SampleS, FirstRunHasNoRelocation) {
  const RunSequence runs = unit_runs(5);
  Stream rng = Stream::derive(4, StreamTag::Test, 0);
  for (auto sampler : {AncestrySampler::Bernoulli, AncestrySampler::Skip}) {
    const auto s = sample_S(runs, kUniform, 0.7, rng, sampler, true);
    EXPECT_EQ(s.i_of_t, 1u);
    EXPECT_EQ(s.A, 0.7);
    EXPECT_EQ(s.B, 0.0);
    EXPECT_EQ(s.S, 0.7);
    EXPECT_TRUE(s.ancestors.empty());
  }
}

TEST(SampleS, MeanOfBMatchesBernoulliUniformProduct) {
  const std::size_t n = 1000;
  const RunSequence runs = unit_runs(n + 10);
  const double t = static_cast<double>(n) - 0.5;  // i(t) = n
  double expected = 0;
  double var_expected = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double p = 1.0 / static_cast<double>(i);
    // B = sum of Bernoulli(p) * U independent terms
    expected += 0.5 * p;
    var_expected += p / 3.0 - 0.25 * p * p;
  }
  for (auto sampler : {AncestrySampler::Bernoulli, AncestrySampler::Skip}) {
    Stream rng = Stream::derive(5, StreamTag::Test, static_cast<std::uint64_t>(sampler));
    const int samples = 100'000;
    double sum = 0;
    for (int k = 0; k < samples; ++k) {
      const auto s = sample_S(runs, kUniform, t, rng, sampler);
      ASSERT_EQ(s.i_of_t, n);
      sum += s.B;
    }
    EXPECT_NEAR(sum / samples, expected, 3 * std::sqrt(var_expected / samples));
  }
  EXPECT_NEAR(expected, 0.5 * (std::log(static_cast<double>(n)) + oracle::kEulerGamma), 1e-3);
}

TEST(SampleS, AssembledFromKeptDraws) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, RunCount{400}, 6);
  Stream rng = Stream::derive(6, StreamTag::Test, 0);
  for (int k = 0; k < 2000; ++k) {
    const auto s = sample_S(runs, kernel, 300.0, rng, AncestrySampler::Skip, true);
    ASSERT_EQ(s.ancestors.size(), s.F_draws.size());
    double B = 0;
    for (std::size_t j = 0; j < s.ancestors.size(); ++j) {
      ASSERT_LT(s.ancestors[j], s.i_of_t);
      if (j > 0) ASSERT_LT(s.ancestors[j], s.ancestors[j - 1]);
      ASSERT_LE(s.F_draws[j], runs.length(s.ancestors[j]));
      B += s.F_draws[j];
    }
    ASSERT_NEAR(s.B, B, 1e-9);
    ASSERT_EQ(s.S, s.A + s.B);
    if (!s.ancestors.empty()) ASSERT_EQ(s.ancestors.back(), 1u);
  }
}

TEST(SampleS, NeverExceedsT) {
  for (auto kernel : {kUniform, MemoryKernelSpec::mu2(1, 0.5), MemoryKernelSpec::mu1(2, 1), MemoryKernelSpec::mu2(4, 0.5)}) {
    for (auto dist : {kDet1, RunLengthSpec::uniform_interval(0, 2), RunLengthSpec::stretched_exp_tail(2, 1)}) {
      const RunSequence runs = RunSequence::build(dist, kernel, Horizon{120.0}, 7);
      Stream rng = Stream::derive(7, StreamTag::Test, 0);
      double max_excess = -INFINITY;
      for (int k = 0; k < 100'000; ++k) {
        const double t = 100.0 + 0.1 * (k % 7);
        const double S = sample_S_value(runs, kernel, t, rng);
        ASSERT_GE(S, 0.0);
        max_excess = std::max(max_excess, S - t);
      }
      EXPECT_LE(max_excess, 0.0);
    }
  }
}

TEST(SampleS, SkipAndBernoulliSamplersAgree) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, RunCount{300}, 8);
  Stream a = Stream::derive(8, StreamTag::Test, 0);
  Stream b = Stream::derive(8, StreamTag::Test, 1);
  Stream c = Stream::derive(8, StreamTag::Test, 2);
  const int n = 50'000;
  std::vector<double> bern(n), skip(n), fast(n);
  for (int k = 0; k < n; ++k) {
    bern[k] = sample_S(runs, kernel, 250.0, a, AncestrySampler::Bernoulli).S;
    skip[k] = sample_S(runs, kernel, 250.0, b, AncestrySampler::Skip).S;
    fast[k] = sample_S_value(runs, kernel, 250.0, c);
  }
  const double crit = ks_critical_value(n, n, 1e-3);
  EXPECT_LT(ks_two_sample(bern, skip).statistic, crit);
  EXPECT_LT(ks_two_sample(bern, fast).statistic, crit);
}

TEST(SimulateDirect, FirstRunIsPlainMarkovProcess) {
  const RunSequence runs = unit_runs(5);
  Stream rng = Stream::derive(9, StreamTag::Test, 0);
  const int n = 50'000;
  std::vector<double> xs(n);
  for (auto& x : xs) {
    const auto r = simulate_direct(runs, kUniform, MarkovModel::brownian(1), kOrigin, 0.8, rng, true);
    ASSERT_TRUE(r.trace.records.empty());
    x = r.X[0];
  }
  auto cdf = [](double x, const void*) { return oracle::normal_cdf(x / std::sqrt(0.8)); };
  EXPECT_LT(ks_one_sample(xs, cdf, nullptr), ks_critical_value(n, 1u << 30, 1e-3));
}

TEST(SimulateDirect, SymmetricMeanZero) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  for (auto model : {MarkovModel::brownian(1), MarkovModel::lattice_walk(1)}) {
    const RunSequence runs = RunSequence::build(kDet1, kernel, RunCount{60}, 10);
    Stream rng = Stream::derive(10, StreamTag::Test, 0);
    const int n = 100'000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = simulate_direct(runs, kernel, model, kOrigin, 40.0, rng).X[0];
    const MeanVar mv = mean_var(xs);
    EXPECT_NEAR(mv.mean, 0.0, 3 * std::sqrt(mv.variance / n));
  }
}

TEST(SimulateDirect, TraceInvariants) {
  const RunSequence runs = unit_runs(80);
  Stream rng = Stream::derive(11, StreamTag::Test, 0);
  const Point start{3.0};
  for (int k = 0; k < 2000; ++k) {
    const auto r = simulate_direct(runs, kUniform, MarkovModel::lattice_walk(1), start, 50.5, rng, true);
    ASSERT_EQ(r.trace.records.size(), 50u);
    ASSERT_EQ(r.trace.endpoint, r.X);
    for (const auto& rec : r.trace.records) {
      ASSERT_LT(rec.R, runs.time(rec.n));
      ASSERT_GE(rec.R, 0.0);
      ASSERT_EQ(rec.run, runs.run_containing(rec.R));
      ASSERT_EQ(rec.V.size(), 1u);
      ASSERT_EQ(rec.V[0], std::round(rec.V[0]));
      // run 1 covers clock [0, 1): the walk has not jumped yet
      if (rec.run == 1) ASSERT_EQ(rec.V, start);
    }
  }
}

TEST(SimulateDirect, RejectsWrongStartDimension) {
  const RunSequence runs = unit_runs(5);
  Stream rng = Stream::derive(12, StreamTag::Test, 0);
  EXPECT_THROW(simulate_direct(runs, kUniform, MarkovModel::brownian(2), kOrigin, 2.0, rng), DomainError);
  EXPECT_THROW(simulate_timechange(runs, kUniform, MarkovModel::brownian(2), kOrigin, 2.0, rng), DomainError);
  EXPECT_THROW(simulate_direct(runs, kUniform, MarkovModel::brownian(1), kOrigin, 5.0, rng), CapacityError);
}

TEST(SimulateTimechange, MatchesDirectInLaw) {
  struct Case {
    MemoryKernelSpec kernel;
    RunLengthSpec dist;
    MarkovModel model;
    double t;
  };
  const std::vector<Case> cases{
      {kUniform, kDet1, MarkovModel::lattice_walk(1), 20.0},
      {MemoryKernelSpec::mu2(1, 0.5), RunLengthSpec::uniform_interval(0.5, 1.5), MarkovModel::brownian(1), 30.0},
      {MemoryKernelSpec::mu1(2, 1), RunLengthSpec::stretched_exp_tail(2, 1), MarkovModel::brownian(1), 30.0},
      {kUniform, kDet1, MarkovModel::brownian(1), 0.6},
  };
  for (const auto& c : cases) {
    const RunSequence runs = RunSequence::build(c.dist, c.kernel, Horizon{c.t}, 13);
    Stream a = Stream::derive(13, StreamTag::Replica, 0);
    Stream b = Stream::derive(13, StreamTag::ReplicaAlt, 0);
    const int n = 40'000;
    std::vector<double> direct(n), tc(n);
    for (int k = 0; k < n; ++k) {
      direct[k] = simulate_direct(runs, c.kernel, c.model, kOrigin, c.t, a).X[0];
      tc[k] = simulate_timechange(runs, c.kernel, c.model, kOrigin, c.t, b)[0];
    }
    EXPECT_LT(ks_two_sample(direct, tc).statistic, ks_critical_value(n, n, 1e-3)) << c.t;
  }
}

TEST(SimulateTimechange, BrownianVarianceEqualsMeanS) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, Horizon{60.0}, 14);
  const double t = 50.0;
  const int n = 100'000;
  Stream rs = Stream::derive(14, StreamTag::Test, 0);
  double s1 = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const double S = sample_S_value(runs, kernel, t, rs);
    s1 += S;
    s2 += S * S;
  }
  const double ES = s1 / n;
  const double ES2 = s2 / n;
  Stream rx = Stream::derive(14, StreamTag::Test, 1);
  std::vector<double> xs(n);
  for (auto& x : xs) x = simulate_timechange(runs, kernel, MarkovModel::brownian(1), kOrigin, t, rx)[0];
  double m2 = 0;
  for (double x : xs) m2 += x * x;
  m2 /= n;
  // Var(X^2) = 3 E[S^2] - E[S]^2; the S estimate's error is small beside it
  const double se = std::sqrt((3 * ES2 - ES * ES) / n + (ES2 - ES * ES) / n);
  EXPECT_NEAR(m2, ES, 3 * se);
}

TEST(SimulateTimechange, LatticeUsesFloorOfS) {
  const RunSequence runs = unit_runs(30);
  Stream rng = Stream::derive(15, StreamTag::Test, 0);
  for (int k = 0; k < 1000; ++k) {
    const double x = simulate_timechange(runs, kUniform, MarkovModel::lattice_walk(1), kOrigin, 0.9, rng)[0];
    ASSERT_EQ(x, 0.0);  // S = 0.9 < 1: no jump
  }
}

double unit_closed_form(std::size_t n, double xi) {
  // sum_{i<n} log(1 + Lambda(xi)/i), Lambda(xi) = (e^xi - 1 - xi)/xi
  const double lam = xi == 0 ? 0.0 : std::expm1(xi) / xi - 1.0;
  long double acc = 0;
  for (std::size_t i = 1; i < n; ++i) acc += std::log1p(lam / static_cast<double>(i));
  return static_cast<double>(acc);
}

TEST(ExactLogMgfB, XiZeroIsZero) {
  for (auto kernel : {kUniform, MemoryKernelSpec::mu2(1, 0.5), MemoryKernelSpec::mu1(2, 1)}) {
    const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, RunCount{200}, 1);
    EXPECT_EQ(exact_log_mgf_B(runs, kernel, 150.0, 0.0), 0.0);
  }
}

TEST(ExactLogMgfB, UnitClosedForm) {
  const RunSequence runs = unit_runs(5000);
  for (double xi : {-2.0, 0.5, 1.0, 2.0}) {
    for (std::size_t n : {2ul, 10ul, 4000ul}) {
      const double t = static_cast<double>(n) - 0.5;
      EXPECT_NEAR(exact_log_mgf_B(runs, kUniform, t, xi), unit_closed_form(n, xi),
                  1e-12 * std::max(1.0, std::abs(unit_closed_form(n, xi))))
          << xi << " " << n;
    }
  }
}

TEST(ExactLogMgfB, MgfOfFAgainstQuadrature) {
  for (auto kernel : {MemoryKernelSpec::mu2(1, 0.5), MemoryKernelSpec::mu1(2, 1), MemoryKernelSpec::mu1(0.5, 0)}) {
    const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, RunCount{200}, 2);
    for (std::size_t i : {1ul, 2ul, 50ul, 200ul}) {
      const double a = runs.time(i - 1);
      const double L = runs.length(i);
      // density of F: mu(a + u) / W_i, scaled by mu at the right end
      const double ref_log = log_eval(kernel, a + L);
      auto w = [&](double u) {
        const double x = a + u;
        return x <= 0 ? 0.0 : std::exp(log_eval(kernel, x) - ref_log);
      };
      // substitute u = v^2 near 0 for the singular first run; 2 v mu(v^2)
      // has a finite limit at v = 0, so evaluate it in log space off zero
      auto wv = [&](double v) {
        v = std::max(v, 1e-150);
        return std::exp(std::log(2 * v) + log_eval(kernel, v * v) - ref_log);
      };
      for (double xi : {-3.0, 0.5, 2.0}) {
        double num, den;
        if (i == 1) {
          num = oracle::simpson_refined([&](double v) { return wv(v) * std::exp(xi * v * v); }, 0, std::sqrt(L));
          den = oracle::simpson_refined(wv, 0, std::sqrt(L));
        } else {
          num = oracle::simpson_refined([&](double u) { return w(u) * std::exp(xi * u); }, 0, L, 4000);
          den = oracle::simpson_refined(w, 0, L, 4000);
        }
        const double ref = num / den - 1.0;
        EXPECT_NEAR(mgf_F_minus_one(runs, kernel, i, xi), ref, 1e-8 * std::max(1.0, std::abs(ref)))
            << kernel.alpha() << " i=" << i << " xi=" << xi;
      }
    }
  }
}

TEST(ExactLogMgfB, MonteCarloCrossCheck) {
  const RunSequence runs = unit_runs(1100);
  const double t = 1000.0;
  const double xi = 0.5;
  Stream rng = Stream::derive(16, StreamTag::Test, 0);
  const int n = 1'000'000;
  double s1 = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const double S = sample_S_value(runs, kUniform, t, rng);
    const double v = std::exp(xi * S);  // A(t) = 0 so S = B
    s1 += v;
    s2 += v * v;
  }
  const double m = s1 / n;
  const double se = std::sqrt((s2 / n - m * m) / n) / m;
  EXPECT_NEAR(std::log(m), exact_log_mgf_B(runs, kUniform, t, xi), 4 * se);
}

TEST(ExactLogMgfB, ConvexNondecreasingAndDeterministic) {
  for (auto kernel : {MemoryKernelSpec::mu2(1, 0.5), MemoryKernelSpec::mu1(2, 1)}) {
    const RunSequence runs = RunSequence::build(RunLengthSpec::stretched_exp_tail(2, 1), kernel, RunCount{400}, 3);
    const double t = 300.0;
    std::vector<double> v;
    for (double xi = -4; xi <= 4.0001; xi += 0.25) v.push_back(exact_log_mgf_B(runs, kernel, t, xi));
    for (std::size_t k = 1; k < v.size(); ++k) ASSERT_GE(v[k], v[k - 1]);
    for (std::size_t k = 1; k + 1 < v.size(); ++k) ASSERT_GE(v[k + 1] - 2 * v[k] + v[k - 1], -1e-9);
    EXPECT_EQ(exact_log_mgf_B(runs, kernel, t, 1.3), exact_log_mgf_B(runs, kernel, t, 1.3));
  }
}

TEST(ExactLogMgfB, LadderMatchesPointwise) {
  const auto kernel = MemoryKernelSpec::mu2(1, 0.5);
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kernel, Horizon{2000.0}, 4);
  const std::vector<double> horizons{10.0, 100.0, 1000.0, 1999.0};
  const auto ladder = exact_log_mgf_B_ladder(runs, kernel, horizons, 0.8);
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    EXPECT_NEAR(ladder[k], exact_log_mgf_B(runs, kernel, horizons[k], 0.8), 1e-9 * std::abs(ladder[k]));
  }
  EXPECT_THROW(exact_log_mgf_B_ladder(runs, kernel, std::vector<double>{100.0, 10.0}, 0.8), DomainError);
}

}  // namespace
}  // namespace reloc
