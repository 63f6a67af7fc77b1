#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "reloc/kernel.hpp"
#include "reloc/rng.hpp"
#include "reloc/runlength.hpp"

namespace reloc {

struct RunCount {
  std::size_t value;
};

struct Horizon {
  double value;
};

/// One quenched environment: run lengths L_i, relocation times T_i, and the
/// weighted-random-recursive-tree weights W_i = M(T_i) - M(T_{i-1}) with
/// prefix sums S_i = M(T_i), all weights kept in log space.
///
/// Run indices are 1-based as in the model (run i covers [T_{i-1}, T_i));
/// index 0 of times()/log_prefixes() holds T_0 = 0 and log S_0 = -inf.
/// Immutable after construction.
class RunSequence {
 public:
  static RunSequence build(const RunLengthSpec& dist, const MemoryKernelSpec& kernel, RunCount n,
                           std::uint64_t seed);
  /// Smallest run sequence with T_n > horizon.
  static RunSequence build(const RunLengthSpec& dist, const MemoryKernelSpec& kernel,
                           Horizon horizon, std::uint64_t seed);
  /// Arbitrary positive weights with unit run lengths (genealogy-only use).
  static RunSequence from_weights(std::span<const double> weights);

  std::size_t count() const { return times_.size() - 1; }
  std::uint64_t seed() const { return seed_; }

  double length(std::size_t i) const { return lengths_[i]; }
  double time(std::size_t i) const { return times_[i]; }
  double log_weight(std::size_t i) const { return log_weights_[i]; }
  double log_prefix(std::size_t i) const { return log_prefix_[i]; }

  /// W_i / S_i = 1 - exp(log S_{i-1} - log S_i); exactly 1 for i = 1.
  double ratio(std::size_t i) const { return -std::expm1(log_prefix_[i - 1] - log_prefix_[i]); }

  /// log(1 - W_i/S_i) = log S_{i-1} - log S_i.
  double log_complement_ratio(std::size_t i) const { return log_prefix_[i - 1] - log_prefix_[i]; }

  std::span<const double> times() const { return times_; }
  std::span<const double> log_prefixes() const { return log_prefix_; }

  /// i(t): the run with T_{i-1} <= t < T_i. Throws CapacityError when t is
  /// negative or not covered by the built runs.
  std::size_t run_containing(double t) const;

 private:
  RunSequence() = default;
  void append(double length, double log_prefix);

  std::vector<double> lengths_;
  std::vector<double> times_;
  std::vector<double> log_weights_;
  std::vector<double> log_prefix_;
  std::uint64_t seed_ = 0;
};

/// Ancestor indicators (1_{i < n})_{1 <= i < n} of run `target`.
struct AncestryVector {
  std::size_t target = 0;
  std::vector<std::uint8_t> bits;  ///< bits[i - 1] is the indicator for run i.
  std::vector<std::size_t> chain;  ///< indices of ancestors, strictly decreasing.

  std::size_t depth() const { return chain.size(); }
  /// Bit pattern as an integer mask (bit i-1 <-> run i).
  std::uint64_t mask() const;
};

/// Independent Bernoulli(W_i/S_i) indicators, i = 1..n-1.
AncestryVector ancestry_dobrow(const RunSequence& runs, std::size_t target, Stream& rng);

/// Literal parent chain: parent(j) = i with probability W_i / S_{j-1}.
AncestryVector ancestry_direct(const RunSequence& runs, std::size_t target, Stream& rng);

/// Draws k in [1, upper] with probability W_k / S_upper (inverse CDF on log S).
std::size_t draw_weighted_index(const RunSequence& runs, std::size_t upper, Stream& rng);

/// Probability of each ancestor mask over {0,1}^{n-1}, indexed by mask.
using AncestryLaw = std::vector<double>;

inline constexpr std::size_t kMaxExactAncestryTarget = 12;

/// Exact joint law of the ancestor indicators of run n, summed over every
/// parent chain. n must be in [2, 12] (CapacityError beyond).
AncestryLaw exact_ancestry_law(const RunSequence& runs, std::size_t target);

/// Product of independent Bernoulli(W_i / S_i) laws over the same masks.
AncestryLaw bernoulli_product_law(const RunSequence& runs, std::size_t target);

double total_variation(const AncestryLaw& p, const AncestryLaw& q);

}  // namespace reloc
