#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "experiment/config.hpp"
#include "experiment/csv.hpp"

namespace reloc::cli {

inline constexpr int kSchemaVersion = 1;

/// Header of the main CSV of an experiment kind.
std::vector<std::string> schema_header(ExperimentKind kind);

struct NamedTable {
  std::string file;  ///< e.g. "scgf.csv"
  std::string role;  ///< "result" or "theory"
  CsvTable table;
};

/// Runs the experiment and returns its tables; the first is the main CSV.
/// Output bytes depend only on the config, never on `workers`.
std::vector<NamedTable> run_tables(const ExperimentConfig& config, unsigned workers);

/// Sidecar record: schema, library version, seeds and the canonical config.
nlohmann::json metadata(const ExperimentConfig& config, const std::vector<NamedTable>& tables,
                        unsigned workers);

struct RunResult {
  std::vector<std::filesystem::path> files;
};

/// run_tables + writes <kind>.csv, theory CSVs and <kind>.meta.json into out_dir.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         unsigned workers);

}  // namespace reloc::cli
