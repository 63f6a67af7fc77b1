#include "reloc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reloc/errors.hpp"
#include "reloc/numeric.hpp"

namespace reloc {

std::string to_string(MarkovFamily family) {
  return family == MarkovFamily::BrownianMotion ? "BrownianMotion" : "LatticeWalk";
}

std::string to_string(TimeMode mode) {
  return mode == TimeMode::Continuous ? "Continuous" : "Discrete";
}

StepLaw StepLaw::simple(int dimension) {
  StepLaw law;
  for (int j = 0; j < dimension; ++j) {
    for (double sign : {1.0, -1.0}) {
      Point step(static_cast<std::size_t>(dimension), 0.0);
      step[static_cast<std::size_t>(j)] = sign;
      law.steps.push_back(std::move(step));
      law.probs.push_back(1.0 / (2.0 * dimension));
    }
  }
  return law;
}

bool StepLaw::symmetric() const {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    Point neg = steps[k];
    for (double& v : neg) v = -v;
    double mass = 0.0;
    for (std::size_t j = 0; j < steps.size(); ++j) {
      if (steps[j] == neg) mass += probs[j];
    }
    if (std::abs(mass - probs[k]) > 1e-12) return false;
  }
  return true;
}

MarkovModel MarkovModel::brownian(int dimension) {
  if (dimension < 1) throw ConfigError("A3", "dimension must be >= 1");
  return MarkovModel(MarkovFamily::BrownianMotion, TimeMode::Continuous, dimension, {});
}

MarkovModel MarkovModel::lattice_walk(int dimension) {
  if (dimension < 1) throw ConfigError("A3", "dimension must be >= 1");
  MarkovModel model(MarkovFamily::LatticeWalk, TimeMode::Discrete, dimension,
                    StepLaw::simple(dimension));
  model.simple_ = true;
  return model;
}

MarkovModel MarkovModel::lattice_walk(StepLaw law) {
  if (law.steps.empty() || law.steps.size() != law.probs.size()) {
    throw ConfigError("A3", "step law needs matching, non-empty steps and probabilities");
  }
  const std::size_t d = law.steps.front().size();
  if (d == 0) throw ConfigError("A3", "steps must have dimension >= 1");
  double total = 0.0;
  for (std::size_t k = 0; k < law.steps.size(); ++k) {
    if (law.steps[k].size() != d) throw ConfigError("A3", "steps must share one dimension");
    for (double v : law.steps[k]) {
      if (!std::isfinite(v)) throw ConfigError("A3", "step law must have bounded support");
    }
    if (!(law.probs[k] >= 0.0)) throw ConfigError("A3", "step probabilities must be >= 0");
    total += law.probs[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("A3", "step probabilities must sum to 1");
  return MarkovModel(MarkovFamily::LatticeWalk, TimeMode::Discrete, static_cast<int>(d),
                     std::move(law));
}

MarkovModel MarkovModel::make(MarkovFamily family, int dimension, TimeMode mode) {
  if (family == MarkovFamily::LatticeWalk && mode != TimeMode::Discrete) {
    throw ConfigError("A3", "LatticeWalk requires the discrete time mode");
  }
  if (family == MarkovFamily::BrownianMotion && mode != TimeMode::Continuous) {
    throw ConfigError("A3", "BrownianMotion requires the continuous time mode");
  }
  return family == MarkovFamily::LatticeWalk ? lattice_walk(dimension) : brownian(dimension);
}

long long jumps_between(double clock_from, double clock_to) {
  return static_cast<long long>(std::floor(clock_to)) -
         static_cast<long long>(std::floor(clock_from));
}

void step_inplace(const MarkovModel& model, std::span<double> position, Stream& rng) {
  const StepLaw& law = model.law_;
  std::size_t k;
  if (model.simple_) {
    k = static_cast<std::size_t>(rng() % law.steps.size());
  } else {
    double u = rng.uniform();
    k = 0;
    while (k + 1 < law.probs.size() && u >= law.probs[k]) {
      u -= law.probs[k];
      ++k;
    }
  }
  const Point& step = law.steps[k];
  for (std::size_t j = 0; j < position.size(); ++j) position[j] += step[j];
}

void evolve_inplace(const MarkovModel& model, std::span<double> position, double duration,
                    Stream& rng) {
  if (!(duration >= 0.0)) throw DomainError("evolve: duration must be >= 0");
  if (duration == 0.0) return;
  if (model.family() == MarkovFamily::BrownianMotion) {
    std::normal_distribution<double> normal(0.0, std::sqrt(duration));
    for (double& v : position) v += normal(rng);
    return;
  }
  if (duration != std::floor(duration)) {
    throw DomainError("evolve: discrete-time model needs an integer duration");
  }
  const auto steps = static_cast<long long>(duration);
  for (long long k = 0; k < steps; ++k) step_inplace(model, position, rng);
}

Point evolve(const MarkovModel& model, std::span<const double> start, double duration,
             Stream& rng) {
  if (start.size() != static_cast<std::size_t>(model.dimension())) {
    throw DomainError("evolve: start point has the wrong dimension");
  }
  Point out(start.begin(), start.end());
  evolve_inplace(model, out, duration, rng);
  return out;
}

double lambda_Z(const MarkovModel& model, std::span<const double> zeta) {
  if (zeta.size() != static_cast<std::size_t>(model.dimension())) {
    throw DomainError("lambda_Z: zeta has the wrong dimension");
  }
  if (model.family() == MarkovFamily::BrownianMotion) {
    return 0.5 * std::inner_product(zeta.begin(), zeta.end(), zeta.begin(), 0.0);
  }
  if (std::all_of(zeta.begin(), zeta.end(), [](double z) { return z == 0.0; })) return 0.0;
  const StepLaw& law = model.step_law();
  double out = kNegInf;
  for (std::size_t k = 0; k < law.steps.size(); ++k) {
    if (law.probs[k] == 0.0) continue;
    const double dot = std::inner_product(zeta.begin(), zeta.end(), law.steps[k].begin(), 0.0);
    out = logaddexp(out, std::log(law.probs[k]) + dot);
  }
  return out;
}

}  // namespace reloc
