#pragma once

#include <span>
#include <string>
#include <vector>

#include "reloc/rng.hpp"

namespace reloc {

using Point = std::vector<double>;

enum class MarkovFamily { BrownianMotion, LatticeWalk };
enum class TimeMode { Continuous, Discrete };

std::string to_string(MarkovFamily family);
std::string to_string(TimeMode mode);

/// Finite step distribution of a lattice walk: steps[k] taken with probs[k].
struct StepLaw {
  std::vector<Point> steps;
  std::vector<double> probs;

  /// Nearest-neighbour walk on Z^d: one coordinate, chosen uniformly, moves by +-1.
  static StepLaw simple(int dimension);

  bool symmetric() const;
  bool operator==(const StepLaw&) const = default;
};

/// Underlying Markov process Z between relocations.
///
/// A LatticeWalk jumps at integer values of its own clock. When a relocation
/// lands at a non-integer instant, the walk state copied is (position, clock
/// phase), so the glued trajectory along an ancestral line is a single walk
/// run for the accumulated clock time.
class MarkovModel {
 public:
  static MarkovModel brownian(int dimension);
  static MarkovModel lattice_walk(int dimension);
  static MarkovModel lattice_walk(StepLaw law);

  /// Validating factory used by config parsing; rejects family/time-mode mismatches.
  static MarkovModel make(MarkovFamily family, int dimension, TimeMode mode);

  MarkovFamily family() const { return family_; }
  TimeMode time_mode() const { return mode_; }
  int dimension() const { return dimension_; }
  const StepLaw& step_law() const { return law_; }

  /// Lambda_Z depends on zeta only through its norm.
  bool is_isotropic() const { return family_ == MarkovFamily::BrownianMotion || dimension_ == 1; }

  bool operator==(const MarkovModel&) const = default;

 private:
  MarkovModel(MarkovFamily family, TimeMode mode, int dimension, StepLaw law)
      : family_(family), mode_(mode), dimension_(dimension), law_(std::move(law)) {}

  MarkovFamily family_;
  TimeMode mode_;
  int dimension_;
  StepLaw law_;
  bool simple_ = false;
  friend void step_inplace(const MarkovModel&, std::span<double>, Stream&);
};

/// Z(duration) started at `start`. Discrete-time models require an integer
/// duration (DomainError otherwise); duration 0 returns `start` exactly.
Point evolve(const MarkovModel& model, std::span<const double> start, double duration, Stream& rng);

/// In-place variant of evolve for hot loops.
void evolve_inplace(const MarkovModel& model, std::span<double> position, double duration,
                    Stream& rng);

/// One lattice step.
void step_inplace(const MarkovModel& model, std::span<double> position, Stream& rng);

/// Number of lattice jumps in the clock interval (from, to]: floor(to) - floor(from).
long long jumps_between(double clock_from, double clock_to);

/// lim (1/t) log E_x[exp(zeta . Z(t))]: ||zeta||^2/2 for Brownian motion,
/// log E[exp(zeta . step)] for a lattice walk.
double lambda_Z(const MarkovModel& model, std::span<const double> zeta);

}  // namespace reloc
