#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnoc/analytic.hpp"
#include "gnoc/mesh.hpp"
#include "gnoc/power.hpp"
#include "gnoc/systolic.hpp"
#include "gnoc/workload.hpp"

namespace gnoc {

struct LayerSelector {
  std::string model;
  std::string layer;  // "*" selects every layer of the model
};

enum class OutputFormat { Csv, Json };

/// One batch experiment. Parsed from a flat "key = value" file; see README
/// for the key list.
struct RunConfig {
  MeshConfig mesh;                  // rows/cols replaced by each mesh size
  struct NodeDelta {
    int row;
    int col;
    int delta;
  };
  std::vector<NodeDelta> node_deltas;  // applied where the node exists
  std::vector<int> mesh_sizes{8};
  std::vector<LayerSelector> layers{{"alexnet", "*"}};
  bool ru = true;
  bool gather = true;
  bool analytic = true;
  std::uint64_t seed = 1;
  std::optional<std::int64_t> inputs;  // P override
  double stall_prob = 0.0;
  EnergyCoefficients energy;
  OutputFormat format = OutputFormat::Csv;
  std::string output;               // empty: stdout
  std::string event_log;            // empty: no event log
  std::string layer_db;             // empty: built-in table
  int jobs = 1;

  /// Applies one key. Throws ConfigError on an unknown key or bad value.
  void set(std::string_view key, std::string_view value);
  /// Throws ConfigError when nothing would run or a parameter is invalid.
  void validate() const;
  /// Base mesh resized to n x n with the per-node delta table expanded.
  MeshConfig mesh_for(int n) const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

struct Comparison {
  std::optional<double> estimated_pct;      // closed-form model, ideal network
  std::optional<double> simulated_pct;      // (RU - G) / RU on total cycles
  std::optional<double> energy_pct;         // (RU - G) / RU on energy
};

struct LayerResult {
  LayerConfig layer;
  int mesh = 8;
  AnalyticParams params;
  std::optional<RunStats> ru;
  std::optional<RunStats> gather;
  Comparison comparison;
};

struct Report {
  std::vector<LayerResult> results;
};

/// Resolves layer selectors against a database, in config order.
std::vector<LayerConfig> select_layers(const RunConfig& config, const LayerDatabase& db);

/// Runs every (mesh, layer) pair. Simulations may run on `jobs` threads;
/// results keep config order.
Report run(const RunConfig& config);

std::string to_csv(const Report& report);
std::string to_json(const Report& report);
std::string comparison_table(const Report& report);

/// Writes the report in the configured format to config.output (or stdout).
void emit(const Report& report, const RunConfig& config, std::ostream& stdout_stream);

}  // namespace gnoc
