#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bstlimit {

inline constexpr int kConfigSchemaVersion = 1;

/// Declarative description of one experiment run. Parsed from JSON; unknown
/// keys are rejected so that a config fully determines a rerun.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string experiment;
  std::vector<std::uint64_t> n_values;
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  int truncation_depth = 40;
  double mass_floor = 1e-6;
  std::vector<double> rho;
  std::vector<double> z;
  std::vector<double> alpha;
  std::uint64_t ray_grid = 256;
  std::uint64_t workers = 1;
  std::string csv_path;
  std::string manifest_path;
};

/// Names accepted in the "experiment" field.
const std::vector<std::string>& experiment_names();

/// Pinned defaults for each experiment (seeds, sizes, parameter lists).
ExperimentConfig default_config(const std::string& experiment);

/// Parses a JSON document; missing fields take the experiment's defaults.
/// Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// JSON echo of a config (all fields explicit).
std::string config_to_json(const ExperimentConfig& config);

/// Throws ConfigError when a field is outside the domain of the operation
/// it feeds.
void validate(const ExperimentConfig& config);

/// One CSV record: experiment,replicate,n,quantity,node_or_ray,value.
/// Aggregates over replicates use replicate = -1.
struct CsvRow {
  std::string experiment;
  std::int64_t replicate;
  std::uint64_t n;
  std::string quantity;
  std::string node_or_ray;
  double value;
};

struct CriterionResult {
  std::string name;
  bool passed;
  std::string detail;
  std::map<std::string, double> statistics;
};

struct ExperimentResult {
  std::vector<CsvRow> rows;
  std::vector<CriterionResult> criteria;

  bool passed() const;
};

/// Runs the experiment; replicate r draws from stream id r. Output is
/// independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV text with header; values printed with 17 significant digits.
std::string to_csv(const std::vector<CsvRow>& rows);

/// Manifest JSON: config echo, artifact version, mixer id, wall time and
/// per-criterion results.
std::string manifest_json(const ExperimentConfig& config, const ExperimentResult& result,
                          double wall_seconds);

/// Runs and writes the CSV and manifest files named in the config. Throws
/// IoError when an output cannot be written.
ExperimentResult run_and_write(const ExperimentConfig& config);

/// Artifact version string.
const char* artifact_version() noexcept;

}  // namespace bstlimit
