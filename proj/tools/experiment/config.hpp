#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reloc/model.hpp"

namespace reloc::cli {

enum class ExperimentKind { Scgf, Tails, Equivalence, Dobrow, Lemmas, Residual };

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);
const std::vector<ExperimentKind>& all_kinds();

struct ScgfSettings {
  std::vector<double> xi_grid{0.5, 1.0, 2.0};
  std::vector<double> horizons{1e4, 1e5, 1e6, 1e7};
  double theory_xi_min = -2.0;
  double theory_xi_max = 3.0;
  std::size_t theory_points = 101;
  bool operator==(const ScgfSettings&) const = default;
};

struct TailSettings {
  std::vector<double> x_grid{0.7};
  std::vector<double> horizons;  ///< defaults to e^6, e^8, e^10
  std::size_t samples = 1'000'000;
  std::size_t min_hits = 100;
  double theory_x_max = 2.0;
  std::size_t theory_points = 101;
  bool operator==(const TailSettings&) const = default;
};

struct EquivalenceSettings {
  double t = 50.0;
  std::size_t samples = 100'000;
  double threshold = 0.01;
  double alpha = 1e-3;
  bool operator==(const EquivalenceSettings&) const = default;
};

struct DobrowSettings {
  std::vector<std::size_t> targets{2, 3, 4, 5, 6, 7, 8};
  std::size_t samples = 100'000;
  /// Explicit WRRT weights; when empty the weights come from the environment.
  std::vector<double> weights;
  bool operator==(const DobrowSettings&) const = default;
};

struct LemmaSettings {
  std::string sum = "log_power";  ///< log_power | delta_power
  double exponent = 0.0;          ///< b for log_power, delta for delta_power
  std::string g = "one";
  double g_xi = 1.0;
  std::vector<std::size_t> n_ladder{1000, 10000, 100000, 1000000};
  bool operator==(const LemmaSettings&) const = default;
};

struct ResidualSettings {
  std::vector<double> horizons{1e6, 2e6, 5e6, 1e7};
  std::vector<std::uint64_t> env_seeds{1, 2, 3, 4, 5};
  std::size_t dense_points = 1000;
  double threshold = 0.1;
  bool operator==(const ResidualSettings&) const = default;
};

/// A validated experiment. Every field has a canonical flat dotted key; see
/// to_json for the full list.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Scgf;
  ModelSpec model{MemoryKernelSpec::mu1(1.0, 1.0), RunLengthSpec::deterministic(1.0),
                  MarkovModel::lattice_walk(1)};
  std::uint64_t master_seed = 1;
  std::uint64_t env_seed = 1;
  std::optional<unsigned> workers;
  ScgfSettings scgf;
  TailSettings tails;
  EquivalenceSettings equivalence;
  DobrowSettings dobrow;
  LemmaSettings lemmas;
  ResidualSettings residual;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a config document. Nested objects are flattened to dotted keys,
/// so {"kernel": {"alpha": 2}} and {"kernel.alpha": 2} are equivalent.
/// Throws ConfigError; admissibility failures carry the assumption tag.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical flat form with every setting spelled out; parse_config of the
/// result gives back an equal config.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace reloc::cli
