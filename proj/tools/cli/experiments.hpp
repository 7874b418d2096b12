#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"

namespace activemedia::cli {

inline constexpr const char* kToolName = "activemedia";
inline constexpr const char* kToolVersion = "0.1.0";

/// A comma-separated file with one header line.
struct Table {
  /// Suffix appended to the config's file stem: <stem>_<name>.csv.
  std::string name;
  std::string description;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

struct ExperimentResult {
  nlohmann::json outputs = nlohmann::json::object();
  std::vector<Table> tables;
};

/// Validates and runs one experiment; nothing is written.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <stem>.json (config echo, outputs, file index) and the CSV tables
/// into config.out_dir. Returns the path of the JSON record.
std::filesystem::path write_result(const ExperimentConfig& config, const ExperimentResult& result);

/// The JSON record as written by write_result.
nlohmann::json result_record(const ExperimentConfig& config, const ExperimentResult& result);

std::string csv_text(const Table& table);

}  // namespace activemedia::cli
