#pragma once

#include "reloc/kernel.hpp"
#include "reloc/markov.hpp"
#include "reloc/ratefn.hpp"
#include "reloc/runlength.hpp"

namespace reloc {

/// Kernel, run-length law and underlying process of one monkey process.
struct ModelSpec {
  MemoryKernelSpec kernel;
  RunLengthSpec runs;
  MarkovModel markov;

  /// Cross-field admissibility. A lattice walk lives in discrete time, so
  /// its run lengths must be integer-valued (A3 ConfigError otherwise).
  void validate() const;

  RateFunction rate_function() const {
    return RateFunction(runs, markov, kernel.scgf_multiplier());
  }

  bool operator==(const ModelSpec&) const = default;
};

}  // namespace reloc
