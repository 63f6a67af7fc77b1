#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reloc/genealogy.hpp"
#include "reloc/kernel.hpp"
#include "reloc/markov.hpp"
#include "reloc/rng.hpp"

namespace reloc {

struct ResidualTime {
  std::size_t i_of_t = 0;
  double A = 0.0;
};

/// i(t) with T_{i(t)-1} <= t < T_{i(t)} and A(t) = t - T_{i(t)-1}.
/// CapacityError when t is outside [0, T_count).
ResidualTime residual_A(const RunSequence& runs, double t);

/// Distance from a relocation target inside run i to T_{i-1}:
/// P(F <= x) = (M(T_{i-1} + x) - M(T_{i-1})) / W_i. Always in [0, L_i].
double sample_F(const RunSequence& runs, const MemoryKernelSpec& kernel, std::size_t i,
                Stream& rng);

/// How the ancestors of run i(t) are drawn.
///
/// Bernoulli scans all i < i(t) with independent Bernoulli(W_i/S_i) coins.
/// Skip jumps from one ancestor to the next: with independent coins,
/// P(no ancestor in (k, j)) = S_k / S_{j-1}, so the next one below j is an
/// inverse-CDF draw on log S. Same law, O(K log n) instead of O(n).
enum class AncestrySampler { Bernoulli, Skip };

struct TimeChangeSample {
  std::size_t i_of_t = 0;
  double A = 0.0;
  double B = 0.0;
  double S = 0.0;
  std::vector<std::size_t> ancestors;  ///< filled when draws are kept
  std::vector<double> F_draws;         ///< F_i for each entry of `ancestors`
};

TimeChangeSample sample_S(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                          Stream& rng, AncestrySampler sampler = AncestrySampler::Skip,
                          bool keep_draws = false);

/// S(t) only; the allocation-free hot path of sample_S with the skip sampler.
double sample_S_value(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                      Stream& rng);

struct RelocationRecord {
  std::size_t n = 0;         ///< the relocation happens at T_n
  double R = 0.0;            ///< target time, R < T_n
  std::size_t run = 0;       ///< run containing R
  Point V;                   ///< X(R), the start value of run n + 1
};

struct RelocationTrace {
  std::vector<RelocationRecord> records;
  Point endpoint;
};

struct DirectResult {
  Point X;
  RelocationTrace trace;
};

/// Literal model: relocate at every T_n to R_{n+1} drawn with density
/// proportional to mu on [0, T_n) and restart from X(R_{n+1}).
///
/// Only queried values are materialised. Brownian runs are refined with
/// bridges between already-sampled offsets; lattice runs store the jump
/// prefix up to the largest queried offset. A lattice walk jumps at integer
/// values of its own clock; each run carries the clock value at its start,
/// which is inherited from the relocation target.
DirectResult simulate_direct(const RunSequence& runs, const MemoryKernelSpec& kernel,
                             const MarkovModel& model, std::span<const double> start, double t,
                             Stream& rng, bool keep_trace = false);

/// X(t) =_d Z(S(t)). For a lattice walk Z(S) makes floor(S) jumps.
Point simulate_timechange(const RunSequence& runs, const MemoryKernelSpec& kernel,
                          const MarkovModel& model, std::span<const double> start, double t,
                          Stream& rng);

/// E[e^{xi F_i} | L] - 1 for one run, exact up to quadrature tolerance.
double mgf_F_minus_one(const RunSequence& runs, const MemoryKernelSpec& kernel, std::size_t i,
                       double xi);

/// log E[e^{xi B(t)} | L] = sum_{i < i(t)} log(1 + (W_i/S_i)(E[e^{xi F_i}|L] - 1)).
double exact_log_mgf_B(const RunSequence& runs, const MemoryKernelSpec& kernel, double t,
                       double xi);

/// exact_log_mgf_B at each horizon (ascending) in one cumulative pass.
std::vector<double> exact_log_mgf_B_ladder(const RunSequence& runs,
                                           const MemoryKernelSpec& kernel,
                                           std::span<const double> horizons, double xi);

}  // namespace reloc
