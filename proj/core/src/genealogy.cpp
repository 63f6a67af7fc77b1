#include "reloc/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"

namespace reloc {

void RunSequence::append(double length, double log_prefix) {
  const double prev = log_prefix_.back();
  lengths_.push_back(length);
  times_.push_back(times_.back() + length);
  log_prefix_.push_back(log_prefix);
  log_weights_.push_back(prev == kNegInf ? log_prefix
                                         : log_prefix + std::log(-std::expm1(prev - log_prefix)));
}

RunSequence RunSequence::build(const RunLengthSpec& dist, const MemoryKernelSpec& kernel,
                               RunCount n, std::uint64_t seed) {
  if (n.value < 1) throw DomainError("build_runs: need at least one run");
  RunSequence runs;
  runs.seed_ = seed;
  runs.lengths_.reserve(n.value + 1);
  runs.times_.reserve(n.value + 1);
  runs.log_prefix_.reserve(n.value + 1);
  runs.log_weights_.reserve(n.value + 1);
  runs.lengths_.push_back(0.0);
  runs.times_.push_back(0.0);
  runs.log_prefix_.push_back(kNegInf);
  runs.log_weights_.push_back(kNegInf);
  Stream rng = Stream::derive(seed, StreamTag::Environment, 0);
  for (std::size_t i = 1; i <= n.value; ++i) {
    const double length = sample(dist, rng);
    runs.append(length, log_cumulative(kernel, runs.times_.back() + length));
  }
  return runs;
}

RunSequence RunSequence::build(const RunLengthSpec& dist, const MemoryKernelSpec& kernel,
                               Horizon horizon, std::uint64_t seed) {
  if (!(horizon.value > 0.0)) throw DomainError("build_runs: horizon must be > 0");
  RunSequence runs;
  runs.seed_ = seed;
  const auto expected = static_cast<std::size_t>(horizon.value / dist.mean() * 1.05) + 16;
  runs.lengths_.reserve(expected);
  runs.times_.reserve(expected);
  runs.log_prefix_.reserve(expected);
  runs.log_weights_.reserve(expected);
  runs.lengths_.push_back(0.0);
  runs.times_.push_back(0.0);
  runs.log_prefix_.push_back(kNegInf);
  runs.log_weights_.push_back(kNegInf);
  Stream rng = Stream::derive(seed, StreamTag::Environment, 0);
  while (runs.times_.back() <= horizon.value) {
    const double length = sample(dist, rng);
    runs.append(length, log_cumulative(kernel, runs.times_.back() + length));
  }
  return runs;
}

RunSequence RunSequence::from_weights(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("from_weights: need at least one weight");
  RunSequence runs;
  runs.lengths_.push_back(0.0);
  runs.times_.push_back(0.0);
  runs.log_prefix_.push_back(kNegInf);
  runs.log_weights_.push_back(kNegInf);
  double log_total = kNegInf;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("from_weights: weights must be > 0");
    const double log_w = std::log(w);
    log_total = logaddexp(log_total, log_w);
    runs.lengths_.push_back(1.0);
    runs.times_.push_back(runs.times_.back() + 1.0);
    runs.log_prefix_.push_back(log_total);
    runs.log_weights_.push_back(log_w);
  }
  return runs;
}

std::size_t RunSequence::run_containing(double t) const {
  if (!(t >= 0.0)) throw CapacityError("run_containing: t must be >= 0");
  if (!(t < times_.back())) {
    throw CapacityError("run_containing: t = " + std::to_string(t) +
                        " is beyond the built horizon T_n = " + std::to_string(times_.back()));
  }
  // First T_i > t; left-closed runs put t = T_{i-1} into run i.
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin());
}

std::uint64_t AncestryVector::mask() const {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits.size() && i < 64; ++i) {
    if (bits[i]) m |= std::uint64_t{1} << i;
  }
  return m;
}

namespace {

void check_target(const RunSequence& runs, std::size_t target) {
  if (target < 2 || target > runs.count()) {
    throw CapacityError("ancestry: target run " + std::to_string(target) + " outside [2, " +
                        std::to_string(runs.count()) + "]");
  }
}

}  // namespace

std::size_t draw_weighted_index(const RunSequence& runs, std::size_t upper, Stream& rng) {
  const double level = std::log(rng.uniform()) + runs.log_prefix(upper);
  const auto prefix = runs.log_prefixes();
  const auto it = std::lower_bound(prefix.begin() + 1, prefix.begin() + upper + 1, level);
  const auto k = static_cast<std::size_t>(it - prefix.begin());
  return std::min(k, upper);
}

AncestryVector ancestry_dobrow(const RunSequence& runs, std::size_t target, Stream& rng) {
  check_target(runs, target);
  AncestryVector out;
  out.target = target;
  out.bits.assign(target - 1, 0);
  out.bits[0] = 1;
  for (std::size_t i = 2; i < target; ++i) {
    out.bits[i - 1] = rng.uniform() < runs.ratio(i) ? 1 : 0;
  }
  for (std::size_t i = target - 1; i >= 1; --i) {
    if (out.bits[i - 1]) out.chain.push_back(i);
  }
  return out;
}

AncestryVector ancestry_direct(const RunSequence& runs, std::size_t target, Stream& rng) {
  check_target(runs, target);
  AncestryVector out;
  out.target = target;
  out.bits.assign(target - 1, 0);
  std::size_t j = target;
  while (j > 1) {
    j = draw_weighted_index(runs, j - 1, rng);
    out.bits[j - 1] = 1;
    out.chain.push_back(j);
  }
  return out;
}

AncestryLaw exact_ancestry_law(const RunSequence& runs, std::size_t target) {
  check_target(runs, target);
  if (target > kMaxExactAncestryTarget) {
    throw CapacityError("exact_ancestry_law: target " + std::to_string(target) +
                        " exceeds the enumeration capacity of " +
                        std::to_string(kMaxExactAncestryTarget));
  }
  AncestryLaw law(std::size_t{1} << (target - 1), 0.0);
  // Each mask is produced by exactly one decreasing parent chain.
  std::function<void(std::size_t, std::uint64_t, double)> descend =
      [&](std::size_t node, std::uint64_t mask, double prob) {
        const double log_norm = runs.log_prefix(node - 1);
        for (std::size_t parent = 1; parent < node; ++parent) {
          const double p = prob * std::exp(runs.log_weight(parent) - log_norm);
          const std::uint64_t next = mask | (std::uint64_t{1} << (parent - 1));
          if (parent == 1) {
            law[next] += p;
          } else {
            descend(parent, next, p);
          }
        }
      };
  descend(target, 0, 1.0);
  return law;
}

AncestryLaw bernoulli_product_law(const RunSequence& runs, std::size_t target) {
  check_target(runs, target);
  if (target > 32) throw CapacityError("bernoulli_product_law: target too large to tabulate");
  const std::size_t bits = target - 1;
  AncestryLaw law(std::size_t{1} << bits, 0.0);
  for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
    double p = 1.0;
    for (std::size_t i = 1; i <= bits && p != 0.0; ++i) {
      const bool on = (mask >> (i - 1)) & 1u;
      p *= on ? runs.ratio(i) : std::exp(runs.log_complement_ratio(i));
    }
    law[mask] = p;
  }
  return law;
}

double total_variation(const AncestryLaw& p, const AncestryLaw& q) {
  if (p.size() != q.size()) throw DomainError("total_variation: laws on different supports");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
  return 0.5 * sum;
}

}  // namespace reloc
