#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment/config.hpp"
#include "experiment/csv.hpp"
#include "experiment/experiment.hpp"
#include "reloc/errors.hpp"
#include "reloc/parallel.hpp"
#include "reloc/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::optional<unsigned> workers_from_env() {
  const char* raw = std::getenv("RELOC_LDP_WORKERS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const long v = std::stol(raw, &used);
    if (used != std::string(raw).size() || v < 0) throw std::invalid_argument(raw);
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw reloc::ConfigError("", std::string("RELOC_LDP_WORKERS must be a non-negative integer, got '") +
                                     raw + "'");
  }
}

// --workers, then the environment, then the config, then all cores.
unsigned pick_workers(std::optional<unsigned> flag, const reloc::cli::ExperimentConfig& config) {
  std::optional<unsigned> w = flag;
  if (!w) w = workers_from_env();
  if (!w) w = config.workers;
  return reloc::resolve_workers(w.value_or(0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and large-deviation checks for processes with reinforced relocations",
               "reloc-ldp"};
  app.set_version_flag("--version", std::string(reloc::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<unsigned> workers;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV plus metadata");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", workers, "Worker threads (0 = all cores)");
  run->add_option("--out", out_dir, "Output directory");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

  std::string kind_name;
  auto* schema = app.add_subcommand("schema", "Print the CSV header of an experiment kind");
  schema->add_option("kind", kind_name, "scgf|tails|equivalence|dobrow|lemmas|residual")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*schema) {
      std::cout << reloc::cli::join_header(
                       reloc::cli::schema_header(reloc::cli::kind_from_name(kind_name)))
                << '\n';
      return 0;
    }
    if (*validate) {
      const auto config = reloc::cli::load_config(validate_path);
      std::cout << "ok: " << reloc::cli::to_string(config.kind) << '\n';
      return 0;
    }
    const auto config = reloc::cli::load_config(config_path);
    const unsigned w = pick_workers(workers, config);
    const auto result = reloc::cli::run_experiment(config, out_dir, w);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const reloc::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
