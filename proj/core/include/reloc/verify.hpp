#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reloc/genealogy.hpp"
#include "reloc/model.hpp"
#include "reloc/stats.hpp"

namespace reloc {

// ---------------------------------------------------------------- SCGF

struct ScgfXiResult {
  double xi = 0.0;
  std::vector<double> exact;          ///< log E[e^{xi B(t)} | L] per horizon
  std::vector<double> normalised;     ///< exact / s(t)
  std::vector<double> pointwise_gap;  ///< |exact / s(t) - lambda_theory|
  double slope = 0.0;                 ///< least-squares slope of exact vs s(t)
  double intercept = 0.0;
  double lambda_theory = 0.0;         ///< c * Lambda(xi)
  double abs_gap = 0.0;               ///< |slope - lambda_theory|
  double rel_gap = 0.0;               ///< abs_gap / |lambda_theory| (0 when xi = 0)
};

struct ScgfReport {
  std::vector<double> horizons;
  std::vector<double> s_values;
  std::vector<ScgfXiResult> rows;
  std::uint64_t env_seed = 0;
  Regime regime = Regime::A1a;
};

inline constexpr std::size_t kMinScgfLadder = 4;

/// Exact conditional log-MGF of B along the ladder, regressed on s(t).
/// DomainError when the ladder has fewer than 4 points or is not increasing.
ScgfReport scgf_slope_check(const ModelSpec& model, std::span<const double> xi_grid,
                            std::span<const double> horizons, std::uint64_t env_seed,
                            unsigned workers = 1);

// ------------------------------------------------------------ residual

struct ResidualPoint {
  double t = 0.0;
  std::size_t i_of_t = 0;
  double A = 0.0;
  double s = 0.0;
  double ratio = 0.0;  ///< A / s
};

struct SeedSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

SeedSummary summarize(std::span<const double> values);

struct ResidualSeed {
  std::uint64_t seed = 0;
  std::vector<ResidualPoint> ladder;
  double max_ratio = 0.0;  ///< over the ladder
  double q50 = 0.0;        ///< of A/s over a dense log-spaced grid of t
  double q90 = 0.0;
};

struct ResidualReport {
  Regime regime = Regime::A1a;
  bool report_only = false;  ///< A1b: decay holds only in probability
  double threshold = 0.1;
  std::vector<ResidualSeed> seeds;
  SeedSummary max_ratio_summary;
  bool pass = true;          ///< every seed below threshold (always true when report_only)
};

/// A(t)/s(t) for each environment seed. Run lengths are streamed from the
/// same environment stream RunSequence::build uses, so nothing is stored.
ResidualReport residual_check(const ModelSpec& model, std::span<const double> horizons,
                              std::span<const std::uint64_t> env_seeds,
                              std::size_t dense_points = 1000, double threshold = 0.1);

// --------------------------------------------------------------- lemma

/// Test functions g / f used by the sum asymptotics.
struct TestFunction {
  enum class Kind { One, Identity, ExpCentered, ExpDouble };
  Kind kind = Kind::One;
  double xi = 1.0;  ///< ExpCentered: e^{xi x}/xi - x; ExpDouble: e^{2 xi x}/(2 xi)

  double operator()(double x) const;
  /// E[g(L)] under `dist`.
  double mean(const RunLengthSpec& dist) const;
  std::string name() const;
  static TestFunction from_name(const std::string& name, double xi = 1.0);
};

enum class LemmaSum {
  LogPower,    ///< sum g(L_{i+1}) (log T_i)^b / T_i
  DeltaPower,  ///< delta * sum g(L_{i+1}) T_i^{delta - 1}
};

std::string to_string(LemmaSum kind);

struct LemmaPoint {
  std::size_t n = 0;
  double empirical = 0.0;
  double predicted = 0.0;
  double remainder = 0.0;      ///< empirical - predicted
  double scaled_remainder = 0.0;  ///< remainder / log n
};

struct LemmaReport {
  LemmaSum kind = LemmaSum::LogPower;
  double exponent = 0.0;
  std::string g;
  std::vector<LemmaPoint> points;
};

/// Partial sums at each n of the (increasing) ladder against the leading
/// terms E[g]/((b+1)E L) (log n)^{b+1}, E[g]/E L log log n (b = -1), or
/// E[g]/E[L]^{1-delta} n^delta. LogPower sums skip T_i <= 1 when b != 0
/// (log T_i must be positive).
LemmaReport lemma_sum_check(const TestFunction& g, LemmaSum kind, double exponent,
                            const RunLengthSpec& dist, std::span<const std::size_t> n_ladder,
                            std::uint64_t env_seed);

// -------------------------------------------------------------- Dobrow

struct DobrowReport {
  std::size_t target = 0;
  double tv = 0.0;  ///< exact law vs Bernoulli product
  std::size_t samples = 0;
  ChiSquareResult chi2;  ///< ancestry_direct samples vs Bernoulli product
  bool exact_pass = false;
  bool sampled_pass = false;
};

inline constexpr double kDobrowTvTolerance = 1e-10;
inline constexpr double kDobrowChiLevel = 1e-3;

DobrowReport dobrow_gof(const RunSequence& runs, std::size_t target, std::size_t samples,
                        std::uint64_t mc_seed, unsigned workers = 1);

// --------------------------------------------------------- equivalence

struct EquivalenceReport {
  double t = 0.0;
  std::size_t samples = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  double critical = 0.0;   ///< KS critical value at `alpha`
  double threshold = 0.01;
  bool pass = false;       ///< statistic < threshold
  double mean_direct = 0.0;
  double mean_timechange = 0.0;
};

/// First coordinate of X(t) from simulate_direct and simulate_timechange,
/// started at the origin, compared by a two-sample KS test.
EquivalenceReport equivalence_ks(const ModelSpec& model, double t, std::size_t samples,
                                 std::uint64_t env_seed, std::uint64_t mc_seed,
                                 unsigned workers = 1, double threshold = 0.01,
                                 double alpha = 1e-3);

// --------------------------------------------------------------- tails

struct TailCell {
  double x = 0.0;
  double t = 0.0;
  double s = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  Interval p_ci;
  bool resolved = false;
  double exponent = 0.0;     ///< log(p_hat) / s; meaningful only when resolved
  double exponent_lo = 0.0;  ///< from the Wilson bounds
  double exponent_hi = 0.0;
  double theory = 0.0;       ///< -tail_exponent(x)
  double abs_gap = 0.0;      ///< |exponent - theory| when resolved
};

struct TailReport {
  std::vector<double> x_grid;
  std::vector<double> horizons;
  std::vector<TailCell> cells;  ///< x-major: cells[ix * horizons.size() + it]
  std::uint64_t env_seed = 0;
  std::uint64_t mc_seed = 0;
  std::size_t min_hits = 100;

  const TailCell& cell(std::size_t ix, std::size_t it) const {
    return cells[ix * horizons.size() + it];
  }
};

/// Naive Monte Carlo of P(|X(t)| >= x s(t) | L) through the time change.
/// Cells with fewer than `min_hits` hits are flagged unresolved.
TailReport tail_exponent_estimate(const ModelSpec& model, std::span<const double> x_grid,
                                  std::span<const double> horizons, std::size_t samples,
                                  std::uint64_t env_seed, std::uint64_t mc_seed,
                                  unsigned workers = 1, std::size_t min_hits = 100);

/// Smallest x >= 0 with tail_exponent(x) = target (bisection).
double tail_point_for_exponent(const RateFunction& rf, double target);

}  // namespace reloc
